"""Bundled example data: the research-center building with its six-activity
incident, a 12-entry activity-pattern catalog, a second building with a
three-activity pattern, and a parameterized "desk" building that scales the
state space into the tens of thousands for benchmarks.

The JSON files under ``data/`` are generated from the builders here
(``python -m incidentkit.bundled`` regenerates them).
"""

from __future__ import annotations

import json
from importlib import resources

from .catalog import catalog_from_dict
from .incident import CrimeScript
from .system import SystemModel
from .taxonomy import TypeTaxonomy


def _data_text(name):
    return resources.files("incidentkit.data").joinpath(name).read_text("utf-8")


def load_taxonomy():
    return TypeTaxonomy.from_dict(json.loads(_data_text("taxonomy.json")))


def load_research_center():
    return SystemModel.from_dict(json.loads(_data_text("research_center.json")))


def load_incident():
    return CrimeScript.from_dict(json.loads(_data_text("research_center_incident.json")))


def load_catalog_patterns(taxonomy=None):
    taxonomy = taxonomy or load_taxonomy()
    return catalog_from_dict(json.loads(_data_text("catalog.json")), taxonomy)


def load_rc2_building():
    return SystemModel.from_dict(json.loads(_data_text("rc2_building.json")))


def load_rc2_pattern():
    return CrimeScript.from_dict(json.loads(_data_text("rc2_pattern.json")))


def data_path(name):
    return resources.files("incidentkit.data").joinpath(name)


# ---------------------------------------------------------------------------
# builders


def taxonomy_doc():
    def entry(name, parent, level, same_level=False):
        record = {"name": name, "parent": parent, "level": level}
        if same_level:
            record["same_level"] = True
        return record

    return {"entries": [
        entry("PhysicalAsset", None, 1),
        entry("Actor", "PhysicalAsset", 2),
        entry("Visitor", "Actor", 3),
        entry("Employee", "Actor", 3),
        entry("PhysicalStructure", "PhysicalAsset", 2),
        entry("Room", "PhysicalStructure", 2, same_level=True),
        entry("Floor", "PhysicalStructure", 2, same_level=True),
        entry("Building", "PhysicalStructure", 2, same_level=True),
        entry("ComputingDevice", "PhysicalAsset", 2),
        entry("Laptop", "ComputingDevice", 3),
        entry("SmartLight", "ComputingDevice", 3),
        entry("FireAlarm", "ComputingDevice", 3),
        entry("Server", "ComputingDevice", 3),
        entry("HVAC", "ComputingDevice", 3),
        entry("Workstation", "ComputingDevice", 3),
        entry("MotionSensor", "ComputingDevice", 3),
        entry("AccessPoint", "ComputingDevice", 3),
        entry("DigitalAsset", None, 1),
        entry("Network", "DigitalAsset", 2),
        entry("BusNetwork", "Network", 3),
        entry("WifiNetwork", "Network", 3),
        entry("Data", "DigitalAsset", 2),
        entry("File", "Data", 3),
        entry("SensorReading", "Data", 3),
        entry("Software", "DigitalAsset", 2),
        entry("Malware", "Software", 3),
        entry("Firmware", "Software", 3),
        entry("Connection", None, 1),
        entry("PhysicalConnection", "Connection", 2),
        entry("DigitalConnection", "Connection", 2),
        entry("BusConnection", "DigitalConnection", 3),
        entry("WirelessConnection", "DigitalConnection", 3),
    ]}


def _asset(name, type_, attributes=None, contained=()):
    return {"name": name, "type": type_, "attributes": attributes or {},
            "contained": list(contained)}


def _conn(name, kind, a, b, subtype=None):
    record = {"name": name, "kind": kind, "endpoint1": a, "endpoint2": b}
    if subtype:
        record["subtype"] = subtype
    return record


def standard_actions():
    """The building's action rules; slot types constrain matching."""
    return [
        {"name": "enter Room",
         "pre": "(Room1{phys}.Actor) | Room2{phys}",
         "post": "Room1{phys} | (Room2{phys}.Actor)",
         "slots": {"phys": "PhysicalConnection"}},
        {"name": "connect Laptop to BusNetwork physically",
         "pre": "((Actor.Lap) | Dev{phys}) || Bus{phys}",
         "post": "((Actor.Lap{phys}) | Dev) || Bus{phys}",
         "slots": {"Lap": "Laptop", "Dev": "ComputingDevice", "Bus": "BusNetwork",
                   "phys": "PhysicalConnection"}},
        {"name": "connect Laptop to ComputingDevice via BusNetwork",
         "pre": "Actor.Lap{phys1} || Bus{phys1,phys2} || Dev{phys2,dig}",
         "post": "Actor.Lap{phys1,dig} || Bus{phys1,phys2} || Dev{phys2,dig}",
         "slots": {"Lap": "Laptop", "Dev": "ComputingDevice", "Bus": "BusNetwork",
                   "phys1": "PhysicalConnection", "phys2": "PhysicalConnection",
                   "dig": "DigitalConnection"}},
        {"name": "collect File via DigitalConnection",
         "pre": "(Actor.Lap{dig}) || Dev{dig}.File",
         "post": "(Actor.Lap{dig}.File) || Dev{dig}",
         "slots": {"Lap": "Laptop", "Dev": "ComputingDevice",
                   "dig": "DigitalConnection"}},
        {"name": "send Malware via DigitalConnection",
         "pre": "(Actor.Lap{dig}.Malware) || Dev{dig}",
         "post": "(Actor.Lap{dig}) || Dev{dig}.Malware",
         "slots": {"Lap": "Laptop", "Dev": "ComputingDevice",
                   "dig": "DigitalConnection"}},
        {"name": "disable ComputingDevice with Malware",
         "pre": "Dev{dig}.Malware",
         "post": "Dev.Malware",
         "slots": {"Dev": "ComputingDevice", "dig": "DigitalConnection"}},
        {"name": "sniff Data from Network",
         "pre": "(Actor.Lap{nb}) || Net{nb}.Data",
         "post": "(Actor.Lap{nb}.Data) || Net{nb}",
         "slots": {"Lap": "Laptop", "Net": "Network", "nb": "PhysicalConnection"}},
    ]


def research_center_doc():
    actions = [a for a in standard_actions() if a["name"] != "sniff Data from Network"]
    return {
        "name": "researchCenter",
        "assets": [
            _asset("floor2", "Floor", contained=["hallway", "toilet", "serverRoom", "controlRoom"]),
            _asset("hallway", "Room", contained=["visitor"]),
            _asset("toilet", "Room", contained=["sl1"]),
            _asset("serverRoom", "Room", contained=["sl3", "fireAlarm", "server", "hvac"]),
            _asset("controlRoom", "Room", contained=["sl2", "workstation"]),
            _asset("visitor", "Visitor", contained=["laptop"]),
            _asset("laptop", "Laptop", {"model": "X1"}, contained=["malware"]),
            _asset("malware", "Malware"),
            _asset("sl1", "SmartLight", {"status": "ON"}),
            _asset("sl2", "SmartLight", {"status": "ON"}),
            _asset("sl3", "SmartLight", {"status": "ON"}),
            _asset("fireAlarm", "FireAlarm", {"status": "ARMED"}),
            _asset("server", "Server", {"status": "ON"}),
            _asset("hvac", "HVAC", {"status": "ON", "model": "ACME-HVAC-9"},
                   contained=["hvacData"]),
            _asset("hvacData", "File"),
            _asset("workstation", "Workstation", {"status": "ON", "model": "WS-2000"}),
            _asset("busNetwork", "BusNetwork"),
        ],
        "connections": [
            _conn("physToiletHallway", "PHYSICAL", "toilet", "hallway"),
            _conn("physServerRoomHallway", "PHYSICAL", "serverRoom", "hallway"),
            _conn("physControlRoomHallway", "PHYSICAL", "controlRoom", "hallway"),
            _conn("physBus", "PHYSICAL", "sl1", "busNetwork"),
            _conn("physBusSl2", "PHYSICAL", "sl2", "busNetwork"),
            _conn("physBusSl3", "PHYSICAL", "sl3", "busNetwork"),
            _conn("physBusFireAlarm", "PHYSICAL", "fireAlarm", "busNetwork"),
            _conn("physBusWorkstation", "PHYSICAL", "workstation", "busNetwork"),
            _conn("physBusHvac", "PHYSICAL", "hvac", "busNetwork"),
            _conn("digWsHvac", "DIGITAL", "workstation", "hvac", subtype="BusConnection"),
            _conn("digWsFireAlarm", "DIGITAL", "workstation", "fireAlarm", subtype="BusConnection"),
        ],
        "actions": actions,
        "initial": (
            "floor2.("
            "hallway{physToiletHallway,physServerRoomHallway,physControlRoomHallway}"
            ".(visitor.laptop.malware)"
            " | toilet{physToiletHallway}.sl1{physBus}"
            " | serverRoom{physServerRoomHallway}.(sl3{physBusSl3}"
            " | fireAlarm{physBusFireAlarm,digWsFireAlarm} | server"
            " | hvac{physBusHvac,digWsHvac}.hvacData)"
            " | controlRoom{physControlRoomHallway}.(sl2{physBusSl2}"
            " | workstation{physBusWorkstation,digWsHvac,digWsFireAlarm}))"
            " || busNetwork{physBus,physBusSl2,physBusSl3,physBusFireAlarm,"
            "physBusWorkstation,physBusHvac}"
        ),
    }


def incident_doc():
    def activity(name, action, pre, post, nxt=None, **roles):
        record = {"name": name, "action": action, "pre": pre, "post": post}
        record.update({k: v for k, v in roles.items() if v})
        record["next"] = [nxt] if nxt else []
        return record

    return {
        "name": "research center data theft",
        "category": "INSTANCE",
        "entities": [
            {"name": "visitor", "type": "Visitor", "attributes": {"role": "offender"},
             "contained": ["laptop"], "knowledge": "PARTIAL"},
            {"name": "laptop", "type": "Laptop", "attributes": {"model": "X1"},
             "contained": ["malware"], "knowledge": "PARTIAL"},
            {"name": "malware", "type": "Malware", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "sl1", "type": "SmartLight", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "busNetwork", "type": "BusNetwork", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "hvac", "type": "HVAC",
             "attributes": {"status": "ON", "model": "ACME-HVAC-9"},
             "contained": ["hvacData"], "knowledge": "PARTIAL"},
            {"name": "hvacData", "type": "File", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "workstation", "type": "Workstation", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "toilet", "type": "Room", "attributes": {},
             "contained": ["sl1"], "knowledge": "PARTIAL"},
            {"name": "hallway", "type": "Room", "attributes": {},
             "contained": ["visitor"], "knowledge": "PARTIAL"},
        ],
        "connections": [
            _conn("physToiletHallway", "PHYSICAL", "toilet", "hallway"),
            _conn("physBus", "PHYSICAL", "sl1", "busNetwork"),
            _conn("physBusHvac", "PHYSICAL", "hvac", "busNetwork"),
            _conn("physBusWorkstation", "PHYSICAL", "workstation", "busNetwork"),
            _conn("digWsHvac", "DIGITAL", "workstation", "hvac", subtype="BusConnection"),
        ],
        "scenes": [[
            activity("enter toilet", "enter Room",
                     "(hallway{physToiletHallway}.visitor) | toilet{physToiletHallway}",
                     "hallway{physToiletHallway} | (toilet{physToiletHallway}.visitor)",
                     nxt="connect laptop to busNetwork",
                     initiator="visitor", target="toilet", location="hallway"),
            activity("connect laptop to busNetwork",
                     "connect Laptop to BusNetwork physically",
                     "((visitor.laptop) | sl1{physBus}) || busNetwork{physBus}",
                     "((visitor.laptop{physBus}) | sl1) || busNetwork{physBus}",
                     nxt="connect laptop to hvac",
                     initiator="visitor", target="busNetwork", location="toilet",
                     resource="laptop"),
            activity("connect laptop to hvac",
                     "connect Laptop to ComputingDevice via BusNetwork",
                     "visitor.laptop{physBus} || busNetwork{physBus,physBusHvac}"
                     " || hvac{physBusHvac}",
                     "visitor.laptop{physBus,dig} || busNetwork{physBus,physBusHvac}"
                     " || hvac{physBusHvac,dig}",
                     nxt="collect hvacData from hvac",
                     initiator="visitor", target="hvac", location="toilet",
                     resource="laptop"),
            activity("collect hvacData from hvac",
                     "collect File via DigitalConnection",
                     "(visitor.laptop{dig}) || hvac{dig}.hvacData",
                     "(visitor.laptop{dig}.hvacData) || hvac{dig}",
                     nxt="send malware to hvac",
                     initiator="visitor", target="hvacData", location="toilet",
                     resource="laptop"),
            activity("send malware to hvac",
                     "send Malware via DigitalConnection",
                     "(visitor.laptop{dig}.malware) || hvac{dig}",
                     "(visitor.laptop{dig}) || hvac{dig}.malware",
                     nxt="disable hvac",
                     initiator="visitor", target="hvac", location="toilet",
                     resource="malware"),
            activity("disable hvac",
                     "disable ComputingDevice with Malware",
                     "hvac{dig}.malware",
                     "hvac.malware",
                     initiator="visitor", target="hvac", resource="malware"),
        ]],
    }


def catalog_doc():
    def pattern(name, category, level, severity, provenance, activity_name,
                pre, post, links=None, description=""):
        return {"name": name, "category": category, "level": level,
                "severity": severity, "provenance": provenance,
                "activity_name": activity_name, "pre": pre, "post": post,
                "links": links or {}, "description": description}

    return {"patterns": [
        pattern("Collect Data from Common Resource Locations",
                "Collect and Analyze Information", "STANDARD", "MEDIUM",
                "CAPEC-150", "collect data from targetResource",
                "Actor.ComputingDevice{cn} || ComputingDevice{cn}.File",
                "Actor.ComputingDevice{cn}.File || ComputingDevice{cn}",
                {"cn": "DigitalConnection"},
                "An offender's device reads a file from its well-known location "
                "on a reachable device; afterwards the offender's device holds "
                "the file."),
        pattern("Sniffing Attacks",
                "Collect and Analyze Information", "STANDARD", "MEDIUM",
                "CAPEC-157", "sniff data from targetNetwork",
                "Actor.ComputingDevice{nb} || Network{nb}.Data",
                "Actor.ComputingDevice{nb}.Data || Network{nb}",
                {},
                "An offender's device shares a medium with a network carrying "
                "data and captures the transmitted data."),
        pattern("Content Spoofing",
                "Engage in Deceptive Interactions", "META", "MEDIUM",
                "CAPEC-148", "spoof content on targetDevice",
                "Actor.ComputingDevice{cs}.Data || ComputingDevice{cs}",
                "Actor.ComputingDevice{cs} || ComputingDevice{cs}.Data",
                {"cs": "DigitalConnection"},
                "An offender pushes crafted data over an established channel so "
                "the target presents it as authentic."),
        pattern("Establish Rogue Location",
                "Engage in Deceptive Interactions", "STANDARD", "MEDIUM",
                "CAPEC-616", "establish rogue device in targetRoom",
                "Room{rp}.(Actor.ComputingDevice)",
                "Room{rp}.(Actor | ComputingDevice)",
                {"rp": "PhysicalConnection"},
                "An offender plants a carried device at a location so victims "
                "interact with it as if it belonged there."),
        pattern("Exploitation of Trusted Credentials",
                "Subvert Access Control", "META", "HIGH",
                "CAPEC-21", "exploit trusted credentials of targetDevice",
                "Actor.ComputingDevice{tc}.Data || ComputingDevice{tc}",
                "Actor.ComputingDevice{tc,tc2} || ComputingDevice{tc,tc2}",
                {"tc": "DigitalConnection", "tc2": "DigitalConnection"},
                "An offender holding credential data opens an additional "
                "trusted channel to the target."),
        pattern("Physical Theft",
                "Subvert Access Control", "META", "HIGH",
                "CAPEC-507", "steal targetDevice",
                "Room{rp}.(Actor | ComputingDevice)",
                "Room{rp}.Actor.ComputingDevice",
                {"rp": "PhysicalConnection"},
                "An offender co-located with a device takes it; afterwards the "
                "offender carries the device."),
        pattern("Using Malicious Files",
                "Subvert Access Control", "STANDARD", "VERY_HIGH",
                "CAPEC-17", "use maliciousFile on targetCompDevice",
                "Actor.ComputingDevice{mf}.Malware || ComputingDevice{mf}",
                "Actor.ComputingDevice{mf} || ComputingDevice{mf}.Malware",
                {"mf": "DigitalConnection"},
                "An offender delivers a malicious file over a digital channel; "
                "afterwards the file resides on the target."),
        pattern("Functionality Bypass",
                "Abuse Existing Functionality", "META", "MEDIUM",
                "CAPEC-554", "bypass functionality of targetCompDevice",
                "ComputingDevice{fb}.Malware",
                "ComputingDevice.Malware",
                {"fb": "DigitalConnection"},
                "Malicious content on a device suppresses the device's normal "
                "function; afterwards the device no longer serves its channel."),
        pattern("Email Injection",
                "Inject Unexpected Items", "STANDARD", "MEDIUM",
                "CAPEC-134", "inject message via targetNetwork",
                "Actor.ComputingDevice{ni} || Network{ni,ni2} || ComputingDevice{ni2}",
                "Actor.ComputingDevice{ni} || Network{ni,ni2} || ComputingDevice{ni2}.Data",
                {"ni": "DigitalConnection", "ni2": "DigitalConnection"},
                "An offender injects a crafted message through a shared network "
                "so it lands on the target device."),
        pattern("Hardware Integrity Attack",
                "Manipulate System Resources", "META", "HIGH",
                "CAPEC-440", "tamper with targetDevice hardware",
                "Room{hw}.(Actor.Malware | ComputingDevice)",
                "Room{hw}.(Actor | ComputingDevice.Malware)",
                {"hw": "PhysicalConnection"},
                "An offender with physical access implants malicious content "
                "directly into co-located hardware."),
        pattern("move between rooms",
                "Common Building Actions", "STANDARD", "LOW",
                "domain-common", "move to targetRoom",
                "(Room{mv}.Actor) | Room{mv}",
                "Room{mv} | (Room{mv}.Actor)",
                {"mv": "PhysicalConnection"},
                "An actor moves from one room into a physically connected one."),
        pattern("connect digitally to computingDevice",
                "Common Building Actions", "STANDARD", "MEDIUM",
                "domain-common", "connect to targetCompDevice",
                "(Actor.ComputingDevice) | ComputingDevice{cb} || Network{cb}",
                "Actor.ComputingDevice{cd} || ComputingDevice{cd}",
                {"cb": "PhysicalConnection", "cd": "DigitalConnection"},
                "An actor carrying a device near networked equipment ends up "
                "with a digital channel from their device to a target device."),
    ]}


def rc2_building_doc():
    return {
        "name": "rc2Building",
        "assets": [
            _asset("groundFloor", "Floor",
                   contained=["lobby", "corridor", "officeA", "officeB", "machineRoom"]),
            _asset("lobby", "Room", contained=["intruder"]),
            _asset("corridor", "Room", contained=["sensor1"]),
            _asset("officeA", "Room", contained=["ap1"]),
            _asset("officeB", "Room", contained=["workstation2"]),
            _asset("machineRoom", "Room", contained=["controller"]),
            _asset("intruder", "Visitor", contained=["fieldLaptop"]),
            _asset("fieldLaptop", "Laptop"),
            _asset("sensor1", "MotionSensor", {"status": "ON"}),
            _asset("ap1", "AccessPoint", {"status": "ON"}),
            _asset("workstation2", "Workstation", {"status": "ON"}),
            _asset("controller", "HVAC", {"status": "ON"}),
            _asset("busNet2", "BusNetwork", contained=["netTraffic"]),
            _asset("netTraffic", "File"),
        ],
        "connections": [
            _conn("physLobbyCorridor", "PHYSICAL", "lobby", "corridor"),
            _conn("physCorridorOfficeA", "PHYSICAL", "corridor", "officeA"),
            _conn("physCorridorOfficeB", "PHYSICAL", "corridor", "officeB"),
            _conn("physCorridorMachineRoom", "PHYSICAL", "corridor", "machineRoom"),
            _conn("physOfficeAOfficeB", "PHYSICAL", "officeA", "officeB"),
            _conn("physBusSensor", "PHYSICAL", "sensor1", "busNet2"),
            _conn("physBusAp", "PHYSICAL", "ap1", "busNet2"),
            _conn("physBusWs2", "PHYSICAL", "workstation2", "busNet2"),
            _conn("physBusController", "PHYSICAL", "controller", "busNet2"),
            _conn("digWs2Controller", "DIGITAL", "workstation2", "controller",
                  subtype="BusConnection"),
        ],
        "actions": [a for a in standard_actions()
                    if a["name"] in ("enter Room",
                                     "connect Laptop to BusNetwork physically",
                                     "connect Laptop to ComputingDevice via BusNetwork",
                                     "sniff Data from Network")],
        "initial": (
            "groundFloor.("
            "lobby{physLobbyCorridor}.(intruder.fieldLaptop)"
            " | corridor{physLobbyCorridor,physCorridorOfficeA,physCorridorOfficeB,"
            "physCorridorMachineRoom}.sensor1{physBusSensor}"
            " | officeA{physCorridorOfficeA,physOfficeAOfficeB}.ap1{physBusAp}"
            " | officeB{physCorridorOfficeB,physOfficeAOfficeB}.workstation2{physBusWs2,digWs2Controller}"
            " | machineRoom{physCorridorMachineRoom}.controller{physBusController,digWs2Controller})"
            " || busNet2{physBusSensor,physBusAp,physBusWs2,physBusController}.netTraffic"
        ),
    }


def rc2_pattern_doc():
    return {
        "name": "network data capture pattern",
        "category": "PATTERN",
        "entities": [
            {"name": "offender1", "type": "Actor", "attributes": {},
             "contained": ["device1"], "knowledge": "PARTIAL"},
            {"name": "device1", "type": "ComputingDevice", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "room1", "type": "Room", "attributes": {},
             "contained": ["compDev1"], "knowledge": "PARTIAL"},
            {"name": "room2", "type": "Room", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "compDev1", "type": "ComputingDevice", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
            {"name": "net1", "type": "Network", "attributes": {},
             "contained": ["data1"], "knowledge": "PARTIAL"},
            {"name": "data1", "type": "Data", "attributes": {},
             "contained": [], "knowledge": "PARTIAL"},
        ],
        "connections": [
            _conn("conn1", "PHYSICAL", "room1", "room2"),
            _conn("conn2", "PHYSICAL", "compDev1", "net1"),
        ],
        "scenes": [[
            {"name": "reach room with networked device",
             "initiator": "offender1", "target": "room1", "location": "room2",
             "pre": "(room2{conn1}.offender1) | room1{conn1}.compDev1{conn2} || net1{conn2}",
             "post": "room2{conn1} | room1{conn1}.(offender1 | compDev1{conn2}) || net1{conn2}",
             "next": ["gain access to network via device"],
             "severity": "LOW"},
            {"name": "gain access to network via device",
             "initiator": "offender1", "target": "net1", "location": "room1",
             "resource": "device1",
             "pre": "room2{conn1} | room1{conn1}.(offender1 | compDev1{conn2}) || net1{conn2}",
             "post": "room1.(offender1.device1{conn2}) || net1{conn2}",
             "next": ["collect data from network"],
             "severity": "MEDIUM"},
            {"name": "collect data from network",
             "initiator": "offender1", "target": "data1", "resource": "device1",
             "pre": "(offender1.device1{conn2}) || net1{conn2}.data1",
             "post": "(offender1.device1{conn2}.data1) || net1{conn2}",
             "next": [],
             "severity": "MEDIUM"},
        ]],
    }


def desk_model(rooms=20):
    """An rc2-flavored building scaled to ``rooms`` ring rooms off a hall.

    Every room holds a bus-wired smart light; room 1 adds a controller
    holding a file, room 2 a console with a digital channel to the
    controller; the walker carries a laptop with a probe payload. The state
    space grows into the tens of thousands once rooms reach ~20.
    """
    assets = [
        _asset("floor0", "Floor",
               contained=["hall"] + [f"room{i}" for i in range(1, rooms + 1)]),
        _asset("hall", "Room", contained=["walker"]),
        _asset("walker", "Visitor", contained=["deskLaptop"]),
        _asset("deskLaptop", "Laptop", contained=["probe"]),
        _asset("probe", "Malware"),
        _asset("deskNet", "BusNetwork", contained=["busData"]),
        _asset("busData", "File"),
        _asset("hub", "HVAC", {"status": "ON"}, contained=["hubFile"]),
        _asset("hubFile", "File"),
        _asset("console", "Workstation", {"status": "ON"}),
    ]
    connections = []
    bus_links = []
    for i in range(1, rooms + 1):
        contained = [f"light{i}"]
        if i == 1:
            contained.append("hub")
        if i == 2:
            contained.append("console")
        assets.append(_asset(f"room{i}", "Room", contained=contained))
        assets.append(_asset(f"light{i}", "SmartLight", {"status": "ON"}))
        connections.append(_conn(f"physHallRoom{i}", "PHYSICAL", "hall", f"room{i}"))
        nxt = i + 1 if i < rooms else 1
        connections.append(_conn(f"physRing{i}", "PHYSICAL", f"room{i}", f"room{nxt}"))
        connections.append(_conn(f"physBusLight{i}", "PHYSICAL", f"light{i}", "deskNet"))
        bus_links.append(f"physBusLight{i}")
    connections.append(_conn("physBusHub", "PHYSICAL", "hub", "deskNet"))
    connections.append(_conn("physBusConsole", "PHYSICAL", "console", "deskNet"))
    connections.append(_conn("digConsoleHub", "DIGITAL", "console", "hub",
                             subtype="BusConnection"))
    bus_links += ["physBusHub", "physBusConsole"]

    room_terms = []
    hall_links = [f"physHallRoom{i}" for i in range(1, rooms + 1)]
    for i in range(1, rooms + 1):
        ring_prev = f"physRing{i - 1}" if i > 1 else f"physRing{rooms}"
        links = [f"physHallRoom{i}", f"physRing{i}", ring_prev]
        inner = [f"light{i}{{physBusLight{i}}}"]
        if i == 1:
            inner.append("hub{physBusHub,digConsoleHub}.hubFile")
        if i == 2:
            inner.append("console{physBusConsole,digConsoleHub}")
        body = inner[0] if len(inner) == 1 else "(" + " | ".join(inner) + ")"
        room_terms.append(f"room{i}{{{','.join(links)}}}.{body}")
    initial = (
        "floor0.(hall{" + ",".join(hall_links) + "}.(walker.deskLaptop.probe) | "
        + " | ".join(room_terms) + ")"
        + " || deskNet{" + ",".join(bus_links) + "}.busData"
    )
    return SystemModel.from_dict({
        "name": f"deskBuilding{rooms}",
        "assets": assets,
        "connections": connections,
        "actions": standard_actions(),
        "initial": initial,
    })


def write_data_files(target_dir):
    import pathlib

    target = pathlib.Path(target_dir)
    target.mkdir(parents=True, exist_ok=True)
    files = {
        "taxonomy.json": taxonomy_doc(),
        "research_center.json": research_center_doc(),
        "research_center_incident.json": incident_doc(),
        "catalog.json": catalog_doc(),
        "rc2_building.json": rc2_building_doc(),
        "rc2_pattern.json": rc2_pattern_doc(),
    }
    for name, doc in files.items():
        with open(target / name, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return sorted(files)


if __name__ == "__main__":
    import os

    here = os.path.join(os.path.dirname(__file__), "data")
    for name in write_data_files(here):
        print("wrote", name)
