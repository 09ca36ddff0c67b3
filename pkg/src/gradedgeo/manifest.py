"""JSON manifests: loading into live objects and emitting constructions.

A manifest lists charts, overlaps (ordered pairs with coordinate images),
triples, and optionally a group, an action, principal transitions, a vector
bundle and a section. Every expression is parsed in the chart it lives on:

* overlap ``(i, j)`` images: chart ``i``;
* bundle transitions ``(i, j)``: chart ``i`` (group point or matrix);
* vector bundle matrices ``(i, j)``: chart ``i``; fibre maps: ``U_i x F``;
* group multiplication: ``G x G'`` (primed copy), inverse: ``G``;
* explicit actions: ``M x G'`` (right) or ``G' x F`` (left).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .algebra import DEFAULT_TRUNCATION, Chart, product_chart
from .bundle import AtlasSpec, BundleSpec, VectorBundleSpec
from .coeff import DEFAULT_POLICY, NumericPolicy
from .errors import GradedError, ManifestError
from .group import (
    Action,
    GroupLaw,
    MatrixGroupLaw,
    adjoint_action,
    builtin_group,
    linear_action,
    right_multiplication,
    trivial_action,
)
from .matrix import GradedMatrix
from .morphism import GradedMorphism
from .parser import format_series, parse_expression

_SCHEMA = None


def schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = json.loads(resources.files("gradedgeo").joinpath("manifest.schema.json").read_text())
    return _SCHEMA


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture manifest."""
    return Path(str(resources.files("gradedgeo").joinpath("fixtures", name)))


def fixture_names() -> list:
    return sorted(p.name for p in resources.files("gradedgeo").joinpath("fixtures").iterdir()
                  if p.name.endswith(".json"))


def resolve_path(path) -> Path:
    """The given path, or a shipped fixture of that name when no such file exists."""
    p = Path(path)
    if p.exists():
        return p
    f = fixture_path(p.name)
    if f.exists():
        return f
    raise ManifestError(f"no such manifest: {path}")


@dataclass
class Session:
    """Everything a manifest describes, resolved into live objects."""

    n: int
    truncation: int
    policy: NumericPolicy
    charts: dict
    atlas: AtlasSpec
    law: GroupLaw | None = None
    action: Action | None = None
    bundle: BundleSpec | None = None
    vector_bundle: VectorBundleSpec | None = None
    section: dict | None = None
    raw: dict = field(default_factory=dict)

    def chart(self, name: str) -> Chart:
        if name in self.charts:
            return self.charts[name]
        if self.law is not None and name == self.law.chart.name:
            return self.law.chart
        if self.action is not None and name == self.action.space.name:
            return self.action.space
        if self.vector_bundle is not None and name == self.vector_bundle.fibre.name:
            return self.vector_bundle.fibre
        raise ManifestError(f"unknown chart {name!r}")


def _domain(d) -> dict:
    return {k: (float(v[0]), float(v[1])) for k, v in (d or {}).items()}


def _chart(spec: dict, n: int, T: int, path: str) -> Chart:
    coords = []
    for k, (name, deg) in enumerate(spec["coordinates"]):
        if len(deg) != n:
            raise ManifestError(f"degree has length {len(deg)}, expected n = {n}", f"{path}.coordinates[{k}]")
        coords.append((name, tuple(deg)))
    try:
        return Chart(spec["name"], coords, n, T, _domain(spec.get("domain")))
    except GradedError as exc:
        raise ManifestError(str(exc), path) from None


def _parse(text, chart: Chart, path: str):
    try:
        return parse_expression(str(text), chart)
    except GradedError as exc:
        raise ManifestError(str(exc), path) from None


def _morphism(images: dict, source: Chart, target: Chart, path: str) -> GradedMorphism:
    missing = [c for c in target.coordinate_names if c not in images]
    if missing:
        raise ManifestError(f"missing images for {missing}", path)
    extra = sorted(set(images) - set(target.coordinate_names))
    if extra:
        raise ManifestError(f"images for unknown coordinates {extra}", path)
    imgs = {y: _parse(images[y], source, f"{path}.{y}") for y in target.coordinate_names}
    try:
        return GradedMorphism(source, target, imgs)
    except GradedError as exc:
        raise ManifestError(str(exc), path) from None


def _matrix(rows, chart: Chart, degrees, path: str) -> GradedMatrix:
    k = len(degrees)
    if len(rows) != k or any(len(r) != k for r in rows):
        raise ManifestError(f"matrix must be {k}x{k}", path)
    ents = [[_parse(x, chart, f"{path}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)]
    return GradedMatrix(chart, degrees, degrees, ents)


def _check_pair(pair, charts, path):
    for name in pair:
        if name not in charts:
            raise ManifestError(f"unknown chart {name!r}", path)


def validate_document(doc) -> None:
    """Schema validation with the failing JSON path in the message."""
    v = jsonschema.Draft202012Validator(schema())
    errors = sorted(v.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ManifestError(f"schema violation: {err.message}", err.json_path)


def load_document(doc: dict, truncation: int | None = None,
                  policy: NumericPolicy = DEFAULT_POLICY) -> Session:
    """Resolve a manifest (already parsed from JSON) into a :class:`Session`."""
    validate_document(doc)
    n = doc["n"]
    T = truncation if truncation is not None else doc.get("truncation", DEFAULT_TRUNCATION)
    charts = {}
    for k, c in enumerate(doc["charts"]):
        ch = _chart(c, n, T, f"$.charts[{k}]")
        if ch.name in charts:
            raise ManifestError(f"duplicate chart {ch.name!r}", f"$.charts[{k}]")
        charts[ch.name] = ch
    transitions, domains = {}, {}
    for k, ov in enumerate(doc.get("overlaps", [])):
        path = f"$.overlaps[{k}]"
        _check_pair(ov["pair"], charts, path + ".pair")
        i, j = ov["pair"]
        if (i, j) in transitions:
            raise ManifestError(f"overlap ({i}, {j}) given twice", path)
        dom = dict(charts[i].domain)
        dom.update(_domain(ov.get("domain")))
        src = charts[i].with_domain(dom)
        transitions[(i, j)] = _morphism(ov["images"], src, charts[j], path + ".images")
        domains[(i, j)] = dom
    triples = {}
    for k, tr in enumerate(doc.get("triples", [])):
        path = f"$.triples[{k}]"
        _check_pair(tr["charts"], charts, path + ".charts")
        a, b, c = tr["charts"]
        for p in ((a, b), (b, c)):
            if p not in transitions:
                raise ManifestError(f"triple needs overlap {p}", path)
        if (c, a) not in transitions and (a, c) not in transitions:
            raise ManifestError(f"triple needs an overlap between {c} and {a}", path)
        dom = dict(domains[(a, b)])
        dom.update(_domain(tr.get("domain")))
        triples[(a, b, c)] = dom
    try:
        atlas = AtlasSpec(list(charts.values()), transitions, domains, triples)
    except GradedError as exc:
        raise ManifestError(str(exc), "$") from None
    s = Session(n, T, policy, charts, atlas, raw=doc)
    if "group" in doc:
        s.law = _group(doc["group"], n, T)
    if "action" in doc:
        if s.law is None:
            raise ManifestError("an action needs a group", "$.action")
        s.action = _action(doc["action"], s.law, n, T, charts)
    if "bundle_transitions" in doc:
        if s.law is None:
            raise ManifestError("bundle transitions need a group", "$.bundle_transitions")
        s.bundle = _bundle(doc["bundle_transitions"], s.law, atlas)
    if "vector_bundle" in doc:
        s.vector_bundle = _vector_bundle(doc["vector_bundle"], atlas, n, T)
    if "section" in doc:
        if s.law is None:
            raise ManifestError("a section needs a group", "$.section")
        s.section = _section(doc["section"], s.law, charts)
    return s


def load_manifest(path, truncation: int | None = None, policy: NumericPolicy = DEFAULT_POLICY) -> Session:
    """Read, validate and resolve a manifest file (shipped fixtures found by name)."""
    p = resolve_path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    return load_document(doc, truncation, policy)


def _group(spec: dict, n: int, T: int) -> GroupLaw:
    path = "$.group"
    if "builtin" in spec:
        name = spec["builtin"]
        try:
            if name == "gl":
                law = builtin_group("gl", T, degrees=spec.get("degrees"), r=spec.get("r", 0),
                                    q=spec.get("q", ()), n=n)
            elif name == "trivial":
                law = builtin_group("trivial", T, n=n)
            else:
                law = builtin_group(name, T)
        except (GradedError, KeyError) as exc:
            raise ManifestError(str(exc), path) from None
        if law.chart.n != n:
            raise ManifestError(f"group {name} uses n = {law.chart.n}, manifest has n = {n}", path)
        return law
    G = _chart(spec["chart"], n, T, path + ".chart")
    shell = GroupLaw.__new__(GroupLaw)
    shell.chart = G
    P = shell.power(2)
    mult = _morphism(spec["multiplication"], P, G, path + ".multiplication")
    inv = _morphism(spec["inverse"], G, G, path + ".inverse")
    unit = {k: Fraction(str(v)) for k, v in spec.get("unit", {}).items()}
    try:
        return GroupLaw(G, mult, unit, inv, name=G.name)
    except GradedError as exc:
        raise ManifestError(str(exc), path) from None


def _action(spec: dict, law: GroupLaw, n: int, T: int, charts: dict) -> Action:
    path = "$.action"
    space = _chart(spec["space"], n, T, path + ".space") if "space" in spec else None
    try:
        if "builtin" in spec:
            kind = spec["builtin"]
            if kind == "right_multiplication":
                return right_multiplication(law)
            if kind == "adjoint":
                return adjoint_action(law)
            if kind == "linear":
                return linear_action(law, space)
            if space is None:
                space = next(iter(charts.values()))
            return trivial_action(law, space)
        g1 = law.copy(1)
        src = product_chart(space, g1) if spec["side"] == "right" else product_chart(g1, space)
        return Action(_morphism(spec["images"], src, space, path + ".images"), law, spec["side"])
    except ManifestError:
        raise
    except GradedError as exc:
        raise ManifestError(str(exc), path) from None


def _bundle(items: list, law: GroupLaw, atlas: AtlasSpec) -> BundleSpec:
    trans = {}
    for k, item in enumerate(items):
        path = f"$.bundle_transitions[{k}]"
        _check_pair(item["pair"], atlas.charts, path + ".pair")
        i, j = item["pair"]
        if not atlas.has(i, j):
            raise ManifestError(f"no overlap ({i}, {j}) in the atlas", path)
        src = atlas.transition(i, j).source if i != j else atlas.chart(i)
        if "matrix" in item:
            if not isinstance(law, MatrixGroupLaw):
                raise ManifestError("matrix transitions need a matrix group", path)
            trans[(i, j)] = law.from_matrix(_matrix(item["matrix"], src, law.degrees, path + ".matrix"))
        else:
            trans[(i, j)] = _morphism(item["images"], src, law.chart, path + ".images")
    try:
        return BundleSpec(atlas, law, trans)
    except GradedError as exc:
        raise ManifestError(str(exc), "$.bundle_transitions") from None


def _vector_bundle(spec: dict, atlas: AtlasSpec, n: int, T: int) -> VectorBundleSpec:
    path = "$.vector_bundle"
    F = _chart(spec["fibre"], n, T, path + ".fibre")
    degs = [d for _, d in F.coordinates]
    shell = VectorBundleSpec(atlas, F, {})
    trans = {}
    for k, item in enumerate(spec["transitions"]):
        p = f"{path}.transitions[{k}]"
        _check_pair(item["pair"], atlas.charts, p + ".pair")
        i, j = item["pair"]
        if not atlas.has(i, j):
            raise ManifestError(f"no overlap ({i}, {j}) in the atlas", p)
        src = atlas.transition(i, j).source if i != j else atlas.chart(i)
        if "matrix" in item:
            trans[(i, j)] = _matrix(item["matrix"], src, degs, p + ".matrix")
        else:
            trans[(i, j)] = _morphism(item["fibre_map"], shell.total(src), F, p + ".fibre_map")
    try:
        return VectorBundleSpec(atlas, F, trans)
    except GradedError as exc:
        raise ManifestError(str(exc), path) from None


def _section(spec: dict, law: GroupLaw, charts: dict) -> dict:
    out = {}
    for name, val in spec.items():
        path = f"$.section.{name}"
        if name not in charts:
            raise ManifestError(f"unknown chart {name!r}", path)
        if isinstance(val, list):
            if not isinstance(law, MatrixGroupLaw):
                raise ManifestError("matrix sections need a matrix group", path)
            out[name] = law.from_matrix(_matrix(val, charts[name], law.degrees, path))
        else:
            out[name] = _morphism(val, charts[name], law.chart, path)
    return out


# --------------------------------------------------------------------------
# emission
# --------------------------------------------------------------------------


def chart_to_json(ch: Chart) -> dict:
    out = {"name": ch.name, "coordinates": [[c, list(d)] for c, d in ch.coordinates]}
    if ch.domain:
        out["domain"] = {k: [float(v[0]), float(v[1])] for k, v in ch.domain.items()}
    return out


def _images(phi: GradedMorphism) -> dict:
    return {y: format_series(s) for y, s in phi.images.items()}


def _matrix_json(M: GradedMatrix) -> list:
    return [[format_series(x) for x in r] for r in M.entries]


def atlas_to_document(atlas: AtlasSpec, description: str | None = None) -> dict:
    doc = {"n": atlas.n, "truncation": atlas.truncation}
    if description:
        doc["description"] = description
    doc["charts"] = [chart_to_json(c) for c in atlas.charts.values()]
    doc["overlaps"] = [{"pair": [i, j], "images": _images(phi), "domain": _dom_json(atlas.domains[(i, j)])}
                       for (i, j), phi in sorted(atlas.transitions.items())]
    if atlas.triples:
        doc["triples"] = [{"charts": list(t), "domain": _dom_json(d)} for t, d in sorted(atlas.triples.items())]
    return doc


def _dom_json(d: dict) -> dict:
    return {k: [float(v[0]), float(v[1])] for k, v in sorted(d.items())}


def vector_bundle_to_document(spec: VectorBundleSpec, description: str | None = None) -> dict:
    doc = atlas_to_document(spec.atlas, description)
    doc["vector_bundle"] = {
        "fibre": chart_to_json(spec.fibre),
        "transitions": [{"pair": [i, j], "matrix": _matrix_json(X)} for (i, j), X in sorted(spec.matrices.items())],
    }
    return doc


def bundle_to_document(spec: BundleSpec, description: str | None = None) -> dict:
    doc = atlas_to_document(spec.atlas, description)
    law = spec.law
    if isinstance(law, MatrixGroupLaw):
        doc["group"] = {"builtin": "gl", "degrees": [list(d) for d in law.degrees]}
        doc["bundle_transitions"] = [{"pair": [i, j], "matrix": _matrix_json(law.to_matrix(p))}
                                     for (i, j), p in sorted(spec.transitions.items())]
    else:
        if law.name == "susy_z22":
            doc["group"] = {"builtin": "susy_z22"}
        else:
            doc["group"] = {"chart": chart_to_json(law.chart), "multiplication": _images(law.multiplication),
                            "inverse": _images(law.inverse_morphism),
                            "unit": {k: str(v) for k, v in law.unit.items()}}
        doc["bundle_transitions"] = [{"pair": [i, j], "images": _images(p)}
                                     for (i, j), p in sorted(spec.transitions.items())]
    return doc


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)
