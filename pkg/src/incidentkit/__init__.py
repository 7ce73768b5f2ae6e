"""Toolkit for modeling cyber-physical systems and security incidents,
extracting abstract incident patterns from concrete incidents, and replaying
patterns against other systems' explored state spaces."""

__version__ = "0.1.0"

from .incident import CrimeScript, validate_script, bind_activity
from .system import SystemModel, validate_system
from .taxonomy import TypeTaxonomy
from .terms import parse_term, term_to_text, canonical_key
from .matching import match, MatchMode, Embedding
from .rewriting import rewrite
from .lts import Lts, generate_lts, export_lts, import_lts
from .catalog import load_catalog
from .extraction import extract, ExtractOptions
from .instantiation import instantiate, InstantiateConfig

__all__ = [
    "CrimeScript", "validate_script", "bind_activity",
    "SystemModel", "validate_system", "TypeTaxonomy",
    "parse_term", "term_to_text", "canonical_key",
    "match", "MatchMode", "Embedding", "rewrite",
    "Lts", "generate_lts", "export_lts", "import_lts",
    "load_catalog", "extract", "ExtractOptions",
    "instantiate", "InstantiateConfig",
    "__version__",
]
