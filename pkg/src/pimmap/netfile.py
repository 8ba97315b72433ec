"""Line-oriented network description files.

Format::

    # comment
    network <name>
    layer name=<label> ifm_w=<int> ifm_h=<int> k_w=<int> k_h=<int> in_ch=<int> out_ch=<int>

Blank lines and ``#`` comments are ignored. Exactly one ``network`` line must
precede the layers.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .model import LayerSpec, MappingError, NetworkSpec, validate_layer

FIELDS = ("name", "ifm_w", "ifm_h", "k_w", "k_h", "in_ch", "out_ch")
BUNDLED = ("vgg13", "resnet18")


class NetworkFileError(MappingError):
    def __init__(self, message: str, line: int | None = None, source: str = "<string>"):
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


def parse_network(text: str, source: str = "<string>") -> NetworkSpec:
    name = None
    layers = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword == "network":
            if name is not None:
                raise NetworkFileError("duplicate network line", lineno, source)
            name = rest.strip()
            if not name or " " in name:
                raise NetworkFileError("network name must be a single token", lineno, source)
        elif keyword == "layer":
            if name is None:
                raise NetworkFileError("layer before network line", lineno, source)
            layers.append(_parse_layer(rest, lineno, source))
        else:
            raise NetworkFileError(f"unknown record {keyword!r}", lineno, source)

    if name is None:
        raise NetworkFileError("missing network line", None, source)
    if not layers:
        raise NetworkFileError(f"network {name!r} has no layers", None, source)
    try:
        return NetworkSpec(name, tuple(layers))
    except MappingError as exc:
        raise NetworkFileError(str(exc), None, source) from exc


def _parse_layer(rest: str, lineno: int, source: str) -> LayerSpec:
    values: dict[str, str] = {}
    for token in rest.split():
        key, sep, value = token.partition("=")
        if not sep or not value:
            raise NetworkFileError(f"malformed field {token!r}, expected key=value", lineno, source)
        if key not in FIELDS:
            raise NetworkFileError(f"unknown field {key!r}", lineno, source)
        if key in values:
            raise NetworkFileError(f"duplicate field {key!r}", lineno, source)
        values[key] = value
    missing = [f for f in FIELDS if f not in values]
    if missing:
        raise NetworkFileError(f"missing field(s) {', '.join(missing)}", lineno, source)

    kwargs: dict = {"name": values["name"]}
    for key in FIELDS[1:]:
        try:
            kwargs[key] = int(values[key])
        except ValueError:
            raise NetworkFileError(f"field {key!r}: {values[key]!r} is not an integer", lineno, source) from None
    try:
        return validate_layer(LayerSpec(**kwargs))
    except MappingError as exc:
        raise NetworkFileError(str(exc), lineno, source) from exc


def render_network(net: NetworkSpec) -> str:
    lines = [f"network {net.name}"]
    for layer in net.layers:
        lines.append("layer " + " ".join(f"{f}={getattr(layer, f)}" for f in FIELDS))
    return "\n".join(lines) + "\n"


def load_network(path_or_name: str | Path) -> NetworkSpec:
    """Load a network file, or a bundled network by name (``vgg13``, ``resnet18``)."""
    if str(path_or_name) in BUNDLED and not Path(path_or_name).exists():
        res = resources.files("pimmap") / "networks" / f"{path_or_name}.net"
        return parse_network(res.read_text(), source=f"bundled:{path_or_name}")
    path = Path(path_or_name)
    try:
        text = path.read_text()
    except OSError as exc:
        raise NetworkFileError(f"cannot read: {exc.strerror}", None, str(path)) from exc
    return parse_network(text, source=str(path))
