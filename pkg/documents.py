#!/usr/bin/env python3
"""
File formats: edge lists, game documents, certificate bundles and reports.

Rationals are always written as "p/q" strings. Certificate bundles travel
either as JSON or as a binary frame [LENGTH][CBOR][CRC]: a 4-byte little
endian length, canonical CBOR, and a 4-byte little endian CRC-32 of the CBOR.
"""
import hashlib
import json
import os
from fractions import Fraction

import cbor2
import crcmod.predefined

from exact_lp import format_rational, parse_rational
from games import make_game
from graph_core import Graph, canonical_key, format_graph, parse_graph, to_mask, vertex_set
from solver_errors import CertificateError, InputError
from stability import allocation_shortfalls, packing_problems
from width_params import (Thicket, TreeDecomposition, VineDecomposition, hitting_size,
                          validate_thicket, validate_tree_decomposition, validate_vine)

calculate_crc = crcmod.predefined.mkPredefinedCrcFun('crc-32')

GAME_FIELDS = {"graph", "coalitions", "tag"}
COALITION_FIELDS = {"members", "value"}


def members_list(s):
    return sorted(int(v) for v in s)


# --- graphs and games ---

def load_graph(path):
    try:
        with open(path, encoding="utf-8") as f:
            return parse_graph(f.read())
    except OSError as e:
        raise InputError(f"cannot read graph file {path}: {e}") from e


def _graph_from_field(value, base_dir):
    if isinstance(value, str):
        return parse_graph(value)
    if isinstance(value, dict) and set(value) == {"file"} and isinstance(value["file"], str):
        return load_graph(os.path.join(base_dir, value["file"]))
    if isinstance(value, dict) and set(value) == {"n", "edges"}:
        try:
            return Graph(int(value["n"]), frozenset((int(u), int(v)) for u, v in value["edges"]))
        except (TypeError, ValueError) as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"graph object needs an integer n and [u, v] edge pairs: {e}") from e
    raise InputError("graph must be an inline edge list, {\"file\": path} or {\"n\", \"edges\"}")


def parse_game_document(doc, base_dir="."):
    if not isinstance(doc, dict):
        raise InputError("game document must be an object")
    unknown = sorted(set(doc) - GAME_FIELDS)
    if unknown:
        raise InputError(f"unknown game document fields: {unknown}")
    if "graph" not in doc or "coalitions" not in doc:
        raise InputError("game document needs graph and coalitions")
    graph = _graph_from_field(doc["graph"], base_dir)
    if not isinstance(doc["coalitions"], list):
        raise InputError(f"coalitions must be a list, got {type(doc['coalitions']).__name__}")
    coalitions = []
    for entry in doc["coalitions"]:
        if not isinstance(entry, dict) or set(entry) != COALITION_FIELDS:
            raise InputError(f"coalition entries need exactly members and value, got {entry!r}")
        try:
            members = vertex_set(entry["members"])
        except (TypeError, ValueError) as e:
            raise InputError(f"coalition members must be vertex indices, got {entry['members']!r}") from e
        coalitions.append((members, entry["value"]))
    return make_game(graph, coalitions, str(doc.get("tag", "")))


def load_game(path):
    doc = load_json(path)
    return parse_game_document(doc, os.path.dirname(os.path.abspath(path)))


def game_document(game):
    return {
        "graph": format_graph(game.graph),
        "coalitions": [{"members": members_list(s), "value": v} for s, v in game.coalitions],
        "tag": game.tag,
    }


# --- certificates ---

def thicket_certificate(t, claimed_hitting_size=None):
    doc = {"kind": "thicket", "sets": [members_list(s) for s in t.sets]}
    if claimed_hitting_size is not None:
        doc["hitting_size"] = claimed_hitting_size
    return doc


def decomposition_certificate(d):
    kind = "tree" if isinstance(d, TreeDecomposition) else "vine"
    return {"kind": kind, "labels": [members_list(l) for l in d.labels],
            "links": [list(link) for link in d.links], "width": d.width}


def allocation_certificate(allocation):
    return {"kind": "allocation",
            "values": {str(i): format_rational(v) for i, v in sorted(allocation.values.items())},
            "cost": format_rational(allocation.cost)}


def packing_certificate(coalitions, value):
    return {"kind": "packing", "coalitions": [members_list(s) for s in coalitions], "value": value}


def shatter_certificate(witness):
    realizers = sorted(witness.realizers.items(), key=lambda yr: canonical_key(yr[0]))
    return {"kind": "shatter", "set": members_list(witness.shattered_set),
            "realizers": [{"subset": members_list(y), "realizer": members_list(r)}
                          for y, r in realizers]}


def certificate_bundle(graph, certificates, game=None):
    bundle = {"graph": format_graph(graph), "certificates": list(certificates)}
    if game is not None:
        bundle["game"] = game_document(game)
    return bundle


def _vertices(graph, members, what):
    """In-range vertex indices of a certificate field; ValueError names anything else."""
    members = list(members)
    bad = [v for v in members
           if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < graph.n]
    if bad:
        raise ValueError(f"{what} {members!r} has out-of-range vertices {bad!r} (n={graph.n})")
    return frozenset(members)


def _links(cert):
    links = []
    for link in cert["links"]:
        if (not isinstance(link, list) or len(link) != 2
                or any(isinstance(a, bool) or not isinstance(a, int) for a in link)):
            raise ValueError(f"link {link!r} is not a pair of node indices")
        links.append(tuple(link))
    return tuple(links)


def _thicket_violations(graph, cert, game):
    t = Thicket(tuple(_vertices(graph, s, "set") for s in cert["sets"]))
    violations = validate_thicket(graph, t)
    if not violations and "hitting_size" in cert:
        actual = hitting_size(graph, t)
        if actual != cert["hitting_size"]:
            violations.append(f"claimed hitting size {cert['hitting_size']}, actual {actual}")
    return violations


def decomposition_from_certificate(graph, cert):
    """Vine or tree decomposition of a certificate; ValueError on foreign vertices or links."""
    cls = TreeDecomposition if cert["kind"] == "tree" else VineDecomposition
    return cls(tuple(_vertices(graph, l, "label") for l in cert["labels"]), _links(cert))


def _decomposition_violations(graph, cert, game):
    d = decomposition_from_certificate(graph, cert)
    check = validate_tree_decomposition if cert["kind"] == "tree" else validate_vine
    violations = check(graph, d)
    if not violations and "width" in cert and cert["width"] != d.width:
        violations.append(f"claimed width {cert['width']}, actual {d.width}")
    return violations


def _shatter_violations(graph, cert, game):
    x = _vertices(graph, cert["set"], "shattered set")
    violations = []
    seen = set()
    for entry in cert["realizers"]:
        y = _vertices(graph, entry["subset"], "subset")
        r = _vertices(graph, entry["realizer"], "realizer")
        seen.add(y)
        if not r or not graph.is_connected_mask(to_mask(r)):
            violations.append(f"realizer {sorted(r)} is not connected")
        elif r & x != y:
            violations.append(f"realizer {sorted(r)} cuts out {sorted(r & x)}, not {sorted(y)}")
    if len(seen) != 2 ** len(x):
        violations.append(f"{len(seen)} realizers for {2 ** len(x)} subsets")
    return violations


def _allocation_violations(graph, cert, game):
    values = {int(i): parse_rational(v) for i, v in cert["values"].items()}
    _vertices(graph, values, "allocation")
    violations = [f"agent {i} has negative value {format_rational(v)}"
                  for i, v in sorted(values.items()) if v < 0]
    violations += [f"coalition {sorted(s)} underpaid" for s in allocation_shortfalls(game, values)]
    if parse_rational(cert["cost"]) != sum(values.values(), Fraction(0)):
        violations.append("cost is not the sum of the values")
    return violations


def _packing_violations(graph, cert, game):
    coalitions = [_vertices(graph, s, "coalition") for s in cert["coalitions"]]
    violations = packing_problems(game, coalitions)
    if not violations and sum(game.value(s) for s in coalitions) != cert["value"]:
        violations.append("packing value is not the sum of its coalition values")
    return violations


CERTIFICATE_CHECKS = {
    "thicket": _thicket_violations,
    "vine": _decomposition_violations,
    "tree": _decomposition_violations,
    "shatter": _shatter_violations,
    "allocation": _allocation_violations,
    "packing": _packing_violations,
}
GAME_CERTIFICATES = {"allocation", "packing"}


def certificate_violations(graph, cert, game=None):
    """Re-validate one certificate document; returns its violations."""
    if not isinstance(cert, dict):
        return [f"certificate must be an object, got {type(cert).__name__}"]
    kind = cert.get("kind")
    check = CERTIFICATE_CHECKS.get(kind) if isinstance(kind, str) else None
    if check is None:
        return [f"unknown certificate kind {kind!r}"]
    if kind in GAME_CERTIFICATES and game is None:
        return [f"{kind} certificate needs the game in the bundle"]
    try:
        return check(graph, cert, game)
    except KeyError as e:
        return [f"{kind} certificate is missing field {e}"]
    except (TypeError, ValueError, AttributeError) as e:
        return [f"malformed {kind} certificate: {e}"]


def verify_bundle(bundle, base_dir="."):
    """List of (index, kind, violations) for every certificate in the bundle."""
    if not isinstance(bundle, dict) or "graph" not in bundle or "certificates" not in bundle:
        raise CertificateError("bundle", ["needs graph and certificates"])
    if not isinstance(bundle["certificates"], list):
        raise CertificateError("bundle", ["certificates must be a list"])
    graph = _graph_from_field(bundle["graph"], base_dir)
    game = parse_game_document(bundle["game"], base_dir) if "game" in bundle else None
    if game is not None and game.graph != graph:
        raise CertificateError("bundle", ["game graph differs from bundle graph"])
    return [(i, cert.get("kind") if isinstance(cert, dict) else None,
             certificate_violations(graph, cert, game))
            for i, cert in enumerate(bundle["certificates"])]


# --- binary frames and fingerprints ---

def encode_frame(doc):
    """[LENGTH][CBOR][CRC]"""
    payload = cbor2.dumps(doc, canonical=True)
    return len(payload).to_bytes(4, "little") + payload + calculate_crc(payload).to_bytes(4, "little")


def decode_frame(data):
    if len(data) < 8:
        raise CertificateError("frame", ["frame shorter than its header and CRC"])
    length = int.from_bytes(data[:4], "little")
    if len(data) != length + 8:
        raise CertificateError("frame", [f"declared length {length} does not match {len(data) - 8}"])
    payload = data[4:4 + length]
    received = int.from_bytes(data[4 + length:], "little")
    calculated = calculate_crc(payload)
    if received != calculated:
        raise CertificateError("frame", [f"CRC mismatch: 0x{received:08X} != 0x{calculated:08X}"])
    try:
        return cbor2.loads(payload)
    except Exception as e:
        raise CertificateError("frame", [f"cbor decode failed: {e}"]) from e


def fingerprint(doc):
    return hashlib.sha256(cbor2.dumps(doc, canonical=True)).hexdigest()


# --- JSON ---

def dumps_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_json(path):
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e


def load_bundle(path):
    """JSON bundle, or a binary frame when the file ends in .cbor."""
    if path.endswith(".cbor"):
        try:
            with open(path, "rb") as f:
                return decode_frame(f.read())
        except OSError as e:
            raise InputError(f"cannot read {path}: {e}") from e
    return load_json(path)


def write_text(path, text):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def write_frame(path, doc):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write(encode_frame(doc))


def gap_report_document(report):
    doc = {
        "kappa": format_rational(report.kappa),
        "kappa_f": format_rational(report.kappa_f),
        "rho": format_rational(report.rho),
        "rho_f": format_rational(report.rho_f),
        "ratio_pc": format_rational(report.ratio_pc),
        "gap_primal": format_rational(report.gap_primal),
        "gap_dual": format_rational(report.gap_dual),
        "alpha_star": format_rational(report.alpha_star),
        "tau": report.tau,
        "checks": dict(sorted(report.checks.items())),
    }
    if report.grand_value is not None:
        doc["grand_value"] = report.grand_value
        doc["core_nonempty"] = report.core_nonempty
        doc["relative_cost"] = format_rational(report.relative_cost)
    cover = report.certificates.get("cover")
    packing = report.certificates.get("packing")
    if cover is not None:
        doc["cover"] = {str(i): v for i, v in sorted(cover.allocation.items())}
    if packing is not None:
        doc["packing"] = packing_certificate(packing.coalitions, packing.value)
    return doc
