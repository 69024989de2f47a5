"""Example configuration files and run settings.

Configs are INI-style files (parsed with :mod:`configparser`); values are
rational expressions in the declared symbols and, where a series is expected,
in ``q``.  Matrices separate rows with ``;`` and entries with whitespace or
commas.  The full schema lives in ``data/SCHEMA.md``.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .errors import SchemaError, UnknownExample
from .exact import RatFunc, Registry
from .series import NovikovSeries

EXAMPLES = ("cp1", "cp1-equivariant", "a2", "a3-numeric", "conifold", "dm-flow-demo")
KINDS = ("frobenius", "toric", "a2", "morse", "dm-flow")


@dataclass
class RunConfig:
    command: str = "run"
    example: Optional[str] = None
    config_path: Optional[str] = None
    order: int = 8
    hbar_window: Tuple[int, int] = (-4, 0)
    max_lattice: int = 6
    fmt: str = "json"
    out: Optional[str] = None

    def __post_init__(self):
        if self.order <= 0:
            raise ValueError("order must be positive")
        if self.max_lattice <= 0:
            raise ValueError("lattice cap must be positive")
        lo, hi = self.hbar_window
        if lo > hi or hi > 0:
            raise ValueError(f"bad hbar window {lo}:{hi}")
        if self.fmt not in ("json", "text"):
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.command == "run":
            if (self.example is None) == (self.config_path is None):
                raise ValueError("give exactly one of an example name or --config")
            if self.example is not None and self.example not in EXAMPLES:
                raise UnknownExample(f"unknown example {self.example!r}; known: {', '.join(EXAMPLES)}")


def parse_hbar_window(text: str) -> Tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*:\s*(-?\d+)\s*", text)
    if not m:
        raise ValueError(f"hbar window must look like a:b, got {text!r}")
    return int(m.group(1)), int(m.group(2))


# ---------------------------------------------------------------- raw files


@dataclass
class ConfigFile:
    path: str
    sections: Dict[str, Dict[str, str]]
    lines: Dict[Tuple[str, str], int] = field(default_factory=dict)

    def line(self, section: str, key: Optional[str] = None) -> Optional[int]:
        return self.lines.get((section, key))

    def error(self, section: str, key: Optional[str], message: str) -> SchemaError:
        where = section if key is None else f"{section}.{key}"
        return SchemaError(where, message, self.line(section, key))

    def has(self, section: str, key: Optional[str] = None) -> bool:
        if section not in self.sections:
            return False
        return key is None or key in self.sections[section]

    def get(self, section: str, key: str, default=None, required=True) -> str:
        if section not in self.sections:
            if not required:
                return default
            raise SchemaError(section, "missing section", None)
        sec = self.sections[section]
        if key not in sec:
            if not required:
                return default
            raise self.error(section, None, f"missing key {key!r}")
        return sec[key]


_HEADER = re.compile(r"^\s*\[([^\]]+)\]")
_KEY = re.compile(r"^\s*([^=:#;\s][^=:]*?)\s*[=:]")


def _line_map(text: str) -> Dict[Tuple[str, Optional[str]], int]:
    out = {}
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        m = _HEADER.match(raw)
        if m:
            section = m.group(1).strip()
            out[(section, None)] = n
            continue
        m = _KEY.match(raw)
        if m and section is not None and not raw[:1].isspace():
            out[(section, m.group(1).strip().lower())] = n
    return out


def read_config_text(text: str, path: str = "<string>") -> ConfigFile:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise SchemaError("<file>", str(exc).splitlines()[0], line) from None
    sections = {s: dict(parser[s]) for s in parser.sections()}
    return ConfigFile(path, sections, _line_map(text))


def read_config(path) -> ConfigFile:
    p = Path(path)
    if not p.exists():
        raise SchemaError("<file>", f"no such file: {path}", None)
    return read_config_text(p.read_text(), str(p))


def builtin_path(name: str) -> Path:
    if name not in EXAMPLES:
        raise UnknownExample(f"unknown example {name!r}; known: {', '.join(EXAMPLES)}")
    return Path(str(resources.files("froblab") / "data" / f"{name}.cfg"))


# ---------------------------------------------------------------- values


def _sympy_locals(names):
    import sympy

    loc = {n: sympy.Symbol(n) for n in names}
    return loc


def parse_expr(text: str, names, cfg: ConfigFile = None, section="", key=""):
    """sympy expression in the given symbol names only."""
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr as sp_parse, standard_transformations

    loc = _sympy_locals(names)
    try:
        e = sp_parse(text, local_dict=loc, transformations=standard_transformations + (convert_xor,),
                     evaluate=True)
    except Exception as exc:  # sympy raises a zoo of exception types here
        raise _err(cfg, section, key, f"cannot parse {text!r}: {exc}") from None
    if not isinstance(e, sympy.Expr):
        raise _err(cfg, section, key, f"{text!r} is not an expression")
    extra = {str(s) for s in e.free_symbols} - set(names)
    if extra:
        raise _err(cfg, section, key, f"unknown symbols {sorted(extra)} in {text!r}")
    if e.has(sympy.Float):
        raise _err(cfg, section, key, f"floating point literal in exact value {text!r}")
    return e


def _err(cfg, section, key, message):
    if cfg is None:
        return SchemaError(f"{section}.{key}" if key else section or "<value>", message, None)
    return cfg.error(section, key or None, message)


def _to_ratfunc(reg: Registry, e) -> RatFunc:
    from .frame import _from_expr
    import sympy

    syms = tuple(sympy.Symbol(n) for n in reg.names)
    return _from_expr(reg, syms, e)


def parse_ratfunc(text: str, reg: Registry, cfg=None, section="", key="") -> RatFunc:
    e = parse_expr(text, reg.names, cfg, section, key)
    try:
        return _to_ratfunc(reg, e)
    except Exception as exc:
        raise _err(cfg, section, key, f"{text!r} is not a rational function: {exc}") from None


def parse_series(text: str, reg: Registry, order, cfg=None, section="", key="") -> NovikovSeries:
    """Rational expression in q (and the registry symbols) expanded to a series."""
    import sympy

    e = parse_expr(text, tuple(reg.names) + ("q",), cfg, section, key)
    q = sympy.Symbol("q")
    num, den = sympy.fraction(sympy.together(e))

    def as_series(p):
        P = sympy.Poly(sympy.expand(p), q)
        terms = {}
        for (k,), c in P.terms():
            terms[k] = _to_ratfunc(reg, c)
        return NovikovSeries.from_dict(reg, terms, order)

    try:
        return as_series(num) * as_series(den).inverse()
    except Exception as exc:
        raise _err(cfg, section, key, f"cannot expand {text!r} as a q-series: {exc}") from None


def split_rows(text: str) -> List[List[str]]:
    return [[x for x in re.split(r"[,\s]+", row.strip()) if x] for row in text.split(";") if row.strip()]


def split_list(text: str, sep=",") -> List[str]:
    return [x.strip() for x in text.split(sep) if x.strip()]


def parse_int_matrix(cfg: ConfigFile, section: str, key: str) -> List[List[int]]:
    rows = split_rows(cfg.get(section, key))
    try:
        out = [[int(x) for x in row] for row in rows]
    except ValueError:
        raise cfg.error(section, key, "matrix entries must be integers") from None
    widths = {len(r) for r in out}
    if len(widths) > 1:
        raise cfg.error(section, key, f"rows have different lengths {sorted(widths)}")
    return out


def parse_ratfunc_matrix(cfg: ConfigFile, section: str, key: str, reg: Registry) -> List[List[RatFunc]]:
    rows = split_rows(cfg.get(section, key))
    out = [[parse_ratfunc(x, reg, cfg, section, key) for x in row] for row in rows]
    n = len(out)
    if any(len(r) != n for r in out):
        raise cfg.error(section, key, "matrix must be square")
    return out


def registry_of(cfg: ConfigFile, section="algebra") -> Registry:
    names = split_list(cfg.get(section, "symbols", "", required=False))
    for n in names:
        if not re.fullmatch(r"[A-Za-z]\w*", n) or n == "q":
            raise cfg.error(section, "symbols", f"bad symbol name {n!r}")
    return Registry(tuple(names))


def kind_of(cfg: ConfigFile) -> str:
    kind = cfg.get("example", "kind").strip()
    if kind not in KINDS:
        raise cfg.error("example", "kind", f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    return kind


# ---------------------------------------------------------------- toric data


def toric_from_config(cfg: ConfigFile):
    from .toric import CohomologyRing, ToricBundleData

    reg = registry_of(cfg)
    gens = split_list(cfg.get("cohomology", "generators"))
    if not gens:
        raise cfg.error("cohomology", "generators", "no generators")
    rels = []
    for g in gens:
        key = f"relation.{g}".lower()
        items = split_list(cfg.get("cohomology", key))
        rels.append([parse_ratfunc(x, reg, cfg, "cohomology", key) for x in items])
    try:
        ring = CohomologyRing(reg, gens, rels)
    except Exception as exc:
        raise cfg.error("cohomology", None, str(exc)) from None
    m = parse_int_matrix(cfg, "bundle", "m")
    lmat = parse_int_matrix(cfg, "bundle", "l")
    r = len(gens)
    if len(m) != r:
        raise cfg.error("bundle", "m", f"expected {r} rows, one per generator")
    if len(lmat) != r:
        raise cfg.error("bundle", "l", f"expected {r} rows, one per generator")
    lam = [parse_ratfunc(x, reg, cfg, "bundle", "lambda") for x in split_list(cfg.get("bundle", "lambda"))]
    lamp_text = cfg.get("bundle", "lambda_prime", "", required=False)
    lamp = [parse_ratfunc(x, reg, cfg, "bundle", "lambda_prime") for x in split_list(lamp_text)]
    if len(m[0]) != len(lam):
        raise cfg.error("bundle", "m", f"rows have {len(m[0])} entries but {len(lam)} weights are given")
    if lmat and lmat[0] and len(lmat[0]) != len(lamp):
        raise cfg.error("bundle", "l", f"rows have {len(lmat[0])} entries but {len(lamp)} weights are given")
    orientation = cfg.get("bundle", "orientation", "concave", required=False).strip()
    if orientation not in ("concave", "convex"):
        raise cfg.error("bundle", "orientation", f"expected concave or convex, got {orientation!r}")
    cone = None
    if cfg.has("bundle", "cone"):
        cone = [tuple(r_) for r_ in parse_int_matrix(cfg, "bundle", "cone")]
        if any(len(g) != r for g in cone):
            raise cfg.error("bundle", "cone", f"cone generators need {r} entries")
    name = cfg.get("example", "name", "", required=False)
    data = ToricBundleData(ring, m, lmat, lam, lamp, orientation, cone, name)
    data.check_nonnegativity()
    return data


def load_toric_config(path):
    cfg = read_config(path)
    if kind_of(cfg) != "toric":
        raise cfg.error("example", "kind", "not a toric config")
    return toric_from_config(cfg)
