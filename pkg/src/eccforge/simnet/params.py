"""Reading and writing ``key=value`` curve parameter files."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Union

from ..ecmath import CurveParams, ECPoint

PARAM_KEYS = ("p", "a", "b", "Gx", "Gy", "n", "h")

# Numbered options match the interactive menu of the original simulation.
SOURCES = {
    "1": "ga_ecc_params.txt",
    "ga": "ga_ecc_params.txt",
    "2": "pso_ecc_params.txt",
    "pso": "pso_ecc_params.txt",
    "3": "secp256k1.txt",
    "secp256k1": "secp256k1.txt",
    "4": "brainpoolP256r1.txt",
    "brainpoolP256r1": "brainpoolP256r1.txt",
}
BUNDLED = {"secp256k1.txt", "brainpoolP256r1.txt"}
DEFAULT_SOURCE = "secp256k1.txt"


class MissingKey(KeyError):
    pass


class ParseError(ValueError):
    pass


def resolve_source(source: Union[str, Path, None], search_dir: Union[str, Path] = ".") -> Path:
    """Map a curve name, menu number or path to a parameter file path."""
    if source is None:
        filename = DEFAULT_SOURCE
    elif isinstance(source, Path):
        return source
    else:
        filename = SOURCES.get(str(source))
        if filename is None:
            return Path(source)
    if filename in BUNDLED:
        return Path(str(resources.files("eccforge.data").joinpath(filename)))
    return Path(search_dir) / filename


def parse_params(text: str) -> CurveParams:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"line {lineno}: expected key=value, got {line!r}")
        try:
            values[key.strip()] = int(value.strip())
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {key.strip()} is not an integer") from exc
    missing = [k for k in PARAM_KEYS if k not in values]
    if missing:
        raise MissingKey(f"missing parameter(s): {', '.join(missing)}")
    return CurveParams(values["a"], values["b"], values["p"],
                       ECPoint(values["Gx"], values["Gy"]), values["n"], values["h"])


def load_params(source: Union[str, Path, None] = None,
                search_dir: Union[str, Path] = ".") -> CurveParams:
    path = resolve_source(source, search_dir)
    return parse_params(path.read_text(encoding="utf-8"))


def format_params(params: CurveParams) -> str:
    if params.G.is_infinity:
        raise ValueError("cannot serialise a generator at infinity")
    return "".join(f"{k}={v}\n" for k, v in params.as_dict().items())


def write_params_file(params, path: Union[str, Path]) -> Path:
    """Write ``params`` (CurveParams or an optimizer Candidate) to ``path``."""
    if hasattr(params, "to_params"):
        params = params.to_params()
    path = Path(path)
    path.write_text(format_params(params), encoding="utf-8", newline="\n")
    return path


def params_to_wire(params: CurveParams) -> dict:
    return {k: str(v) for k, v in params.as_dict().items()}


def params_from_wire(body: dict) -> CurveParams:
    try:
        return CurveParams(int(body["a"]), int(body["b"]), int(body["p"]),
                           ECPoint(int(body["Gx"]), int(body["Gy"])),
                           int(body["n"]), int(body["h"]))
    except KeyError as exc:
        raise MissingKey(str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc

