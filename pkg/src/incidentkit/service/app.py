"""HTTP service wrapping the toolkit: validation, state-space generation,
pattern extraction, instantiation, trace analysis, and the pattern store."""

from __future__ import annotations

import os

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse

from .. import __version__
from ..bundled import load_catalog_patterns, load_taxonomy
from ..catalog import catalog_from_dict
from ..errors import (BoundTooSmallError, DuplicateHashError, FormatError,
                      InvalidInitialStateError, NotInstantiableError,
                      TermSyntaxError, UnknownLabelError, UnknownTypeError,
                      ValidationFailedError)
from ..extraction import ExtractOptions, extract
from ..incident import CrimeScript, validate_script
from ..instantiation import InstantiateConfig, instantiate
from ..lts import generate_lts, lts_from_dict, lts_to_dict
from ..store import PatternStore
from ..system import SystemModel, validate_system
from ..taxonomy import TypeTaxonomy
from .schemas import (AnalyzeRequest, AnalyzeResponse, ExtractRequest,
                      HealthResponse, InstantiateRequest, LtsRequest,
                      PatternAddRequest, PatternAddResponse, RepoEntryModel,
                      ValidateResponse, ValidateScriptRequest,
                      ValidateSystemRequest)

_DOMAIN_ERRORS = (BoundTooSmallError, InvalidInitialStateError,
                  NotInstantiableError, UnknownTypeError, UnknownLabelError,
                  TermSyntaxError)


def _taxonomy_of(doc):
    if doc is None:
        return load_taxonomy()
    return TypeTaxonomy.from_dict(doc)


def create_app(store_dir=None):
    store_dir = store_dir or os.environ.get("INCIDENTKIT_STORE", "pattern-store")
    app = FastAPI(title="incidentkit", version=__version__)
    store = PatternStore(store_dir)

    @app.exception_handler(ValidationFailedError)
    async def _validation_failed(request, exc):
        return JSONResponse(status_code=400, content={
            "detail": {"type": "ValidationFailed",
                       "message": str(exc),
                       "violations": [str(v) for v in exc.violations]}})

    @app.exception_handler(FormatError)
    async def _format_error(request, exc):
        return JSONResponse(status_code=400, content={
            "detail": {"type": "FormatError", "message": str(exc)}})

    @app.exception_handler(DuplicateHashError)
    async def _duplicate(request, exc):
        return JSONResponse(status_code=409, content={
            "detail": {"type": "DuplicateHash", "message": str(exc)}})

    for cls in _DOMAIN_ERRORS:
        @app.exception_handler(cls)
        async def _domain(request, exc, _cls=cls):
            return JSONResponse(status_code=400, content={
                "detail": {"type": _cls.__name__.removesuffix("Error"),
                           "message": str(exc)}})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/validate/system", response_model=ValidateResponse)
    def validate_system_endpoint(req: ValidateSystemRequest):
        taxonomy = _taxonomy_of(req.taxonomy)
        model = SystemModel.from_dict(req.system)
        violations = validate_system(model, taxonomy)
        return ValidateResponse(valid=not violations,
                                violations=[v.__dict__ for v in violations])

    @app.post("/validate/script", response_model=ValidateResponse)
    def validate_script_endpoint(req: ValidateScriptRequest):
        taxonomy = _taxonomy_of(req.taxonomy)
        script = CrimeScript.from_dict(req.script)
        system = SystemModel.from_dict(req.system) if req.system else None
        violations = validate_script(script, taxonomy, system)
        return ValidateResponse(valid=not violations,
                                violations=[v.__dict__ for v in violations])

    @app.post("/lts")
    def lts_endpoint(req: LtsRequest):
        taxonomy = _taxonomy_of(req.taxonomy)
        system = SystemModel.from_dict(req.system)
        initial = req.initial or system.initial
        if not initial:
            raise HTTPException(status_code=422,
                                detail="no initial state given or embedded in the system")
        lts = generate_lts(system, initial, req.max_states, taxonomy=taxonomy)
        return lts_to_dict(lts)

    @app.post("/extract")
    def extract_endpoint(req: ExtractRequest):
        taxonomy = _taxonomy_of(req.taxonomy)
        system = SystemModel.from_dict(req.system)
        instance = CrimeScript.from_dict(req.instance)
        if req.catalog is None:
            patterns = load_catalog_patterns(taxonomy)
        else:
            patterns = catalog_from_dict(req.catalog, taxonomy)
        options = ExtractOptions(prefer_meta=req.prefer_meta)
        if req.kept_properties is not None:
            options.kept_properties = {k: tuple(v) for k, v in req.kept_properties.items()}
        pattern = extract(instance, system, patterns, taxonomy, options)
        return pattern.to_dict()

    @app.post("/instantiate")
    def instantiate_endpoint(req: InstantiateRequest):
        taxonomy = _taxonomy_of(req.taxonomy)
        system = SystemModel.from_dict(req.system)
        pattern = CrimeScript.from_dict(req.pattern)
        violations = validate_script(pattern, taxonomy)
        if violations:
            raise ValidationFailedError(violations)
        lts = lts_from_dict(req.lts)
        config = InstantiateConfig(bound=req.bound, workers=req.workers,
                                   set_limit=req.set_limit, threshold=req.threshold)
        result = instantiate(pattern, system, lts, taxonomy, config)
        return result.to_dict(lts)

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze_endpoint(req: AnalyzeRequest):
        total = len(req.traces)
        occurrence: dict[str, int] = {}
        for seq in req.traces:
            for action in set(seq):
                occurrence[action] = occurrence.get(action, 0) + 1
        pct = {a: c / total for a, c in occurrence.items()} if total else {}
        frequent = sorted(a for a, p in pct.items() if p >= req.threshold)
        shortest_length = min((len(s) for s in req.traces), default=None)
        shortest_count = sum(1 for s in req.traces if len(s) == shortest_length)
        return AnalyzeResponse(occurrence=pct, frequent_actions=frequent,
                               shortest_length=shortest_length,
                               shortest_count=shortest_count if total else 0)

    @app.get("/patterns", response_model=list[RepoEntryModel])
    def list_patterns(name: str | None = None):
        return [RepoEntryModel(**e.__dict__) for e in store.list(name)]

    @app.post("/patterns", response_model=PatternAddResponse)
    def add_pattern(req: PatternAddRequest):
        taxonomy = _taxonomy_of(req.taxonomy)
        pattern_id = store.add(req.pattern, taxonomy)
        return PatternAddResponse(id=pattern_id)

    @app.get("/patterns/{pattern_id}")
    def get_pattern(pattern_id: str):
        doc = store.get(pattern_id)
        if doc is None:
            raise HTTPException(status_code=404, detail="pattern not found")
        return doc

    return app
