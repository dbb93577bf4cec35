"""
File formats.

* Graph JSON: `{"n": int, "W": [n*n floats, row-major], "beta": [+-1, ...]}`,
  plus optional learning diagnostics.
* Covariance JSON: `{"n": int, "C": [n*n floats, row-major]}`.
* Matrix CSV: variables as rows, observations (or signals) as columns, with
  a `node` label column holding `node_0 ... node_{n-1}`.
* `manifest.yaml` beside every command's outputs.

Floats are always written as the shortest decimal that reads back to the
same double.
"""
import json
import os
import typing

import numpy as np
import pandas as pd
import yaml

from balancedgl import __version__
from balancedgl.convertors import CONVERTOR_TYPES
from balancedgl.datastructures import (
    BalancedLaplacian,
    GeneralizedLaplacian,
    PolarityVector,
    SampleCovariance,
    adjacency_from_laplacian,
)
from balancedgl.exceptions import DimensionMismatch
from balancedgl.graphs import laplacian_matrix
from balancedgl.types import Array, ArrayLike

MANIFEST_NAME = "manifest.yaml"

_float = CONVERTOR_TYPES["float"]
_polarity = CONVERTOR_TYPES["polarity"]


class GraphDocument(typing.NamedTuple):
    W: Array
    beta: typing.Optional[PolarityVector]
    extra: typing.Dict[str, typing.Any]

    @property
    def n(self) -> int:
        return int(self.W.shape[0])

    @property
    def laplacian(self) -> Array:
        return laplacian_matrix(self.W)

    def balanced(self) -> BalancedLaplacian:
        if self.beta is None:
            raise ValueError("Graph file carries no polarity vector.")
        return BalancedLaplacian(GeneralizedLaplacian(self.laplacian), self.beta)


def _floats(values: ArrayLike) -> typing.List[float]:
    flat = np.ravel(np.asarray(values, dtype=float))
    if not np.all(np.isfinite(flat)):
        raise ValueError("Non-finite values cannot be serialized.")
    return flat.tolist()


def _square(values: typing.Sequence[typing.Any], n: int, what: str) -> Array:
    flat = np.array([_float.convert(str(value)) for value in values], dtype=float)
    if flat.shape != (n * n,):
        raise DimensionMismatch((n * n,), flat.shape, what)
    return flat.reshape(n, n)


def dump_graph(
    path: str,
    W: ArrayLike,
    beta: typing.Optional[PolarityVector] = None,
    **extra: typing.Any,
) -> None:
    W = np.asarray(W, dtype=float)
    document = {"n": int(W.shape[0]), "W": _floats(W)}  # type: typing.Dict[str, typing.Any]
    if beta is not None:
        document["beta"] = [int(value) for value in beta.beta]
    document.update(extra)
    write_json(path, document)


def dump_balanced(path: str, b: BalancedLaplacian, **extra: typing.Any) -> None:
    dump_graph(path, adjacency_from_laplacian(b.L), b.polarity, **extra)


def load_graph(path: str) -> GraphDocument:
    with open(path, encoding="utf8") as handle:
        document = json.load(handle)
    n = int(document["n"])
    W = _square(document["W"], n, "graph W")
    beta = None
    if document.get("beta") is not None:
        values = [_polarity.convert(str(value)) for value in document["beta"]]
        beta = PolarityVector(np.array(values, dtype=np.int64))
        if beta.n != n:
            raise DimensionMismatch(n, beta.n, "graph beta")
    extra = {key: value for key, value in document.items() if key not in ("n", "W", "beta")}
    return GraphDocument(W=W, beta=beta, extra=extra)


def dump_covariance(path: str, C: SampleCovariance) -> None:
    write_json(path, {"n": C.n, "C": _floats(C.C)})


def load_covariance(path: str) -> SampleCovariance:
    with open(path, encoding="utf8") as handle:
        document = json.load(handle)
    n = int(document["n"])
    return SampleCovariance(_square(document["C"], n, "covariance C"))


def write_matrix_csv(path: str, X: ArrayLike, column_prefix: str = "obs") -> None:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    frame = pd.DataFrame(
        X,
        index=pd.Index([f"node_{i}" for i in range(X.shape[0])], name="node"),
        columns=[f"{column_prefix}_{k}" for k in range(X.shape[1])],
    )
    frame.to_csv(path, float_format=None, lineterminator="\n")


def read_matrix_csv(path: str) -> Array:
    frame = pd.read_csv(path, index_col=0, float_precision="round_trip")
    return frame.to_numpy(dtype=float)


def write_json(path: str, document: typing.Any) -> None:
    with open(path, "w", encoding="utf8") as handle:
        json.dump(document, handle, indent=2, sort_keys=True, allow_nan=False)
        handle.write("\n")


def write_records(path: str, records: typing.Iterable[typing.Mapping[str, typing.Any]]) -> None:
    with open(path, "w", encoding="utf8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True, allow_nan=False))
            handle.write("\n")


def read_records(path: str) -> typing.List[typing.Dict[str, typing.Any]]:
    with open(path, encoding="utf8") as handle:
        return [json.loads(line) for line in handle if line.strip()]


def write_table_csv(path: str, rows: typing.Sequence[typing.Mapping[str, typing.Any]]) -> None:
    pd.DataFrame(list(rows)).to_csv(path, index=False, lineterminator="\n")


def write_manifest(directory: str, command: str, options: typing.Mapping[str, typing.Any]) -> str:
    path = os.path.join(directory, MANIFEST_NAME)
    manifest = {
        "command": command,
        "version": __version__,
        "options": {key: _plain(value) for key, value in options.items()},
    }
    with open(path, "w", encoding="utf8") as handle:
        yaml.safe_dump(manifest, handle, default_flow_style=False, sort_keys=True)
    return path


def read_manifest(directory: str) -> typing.Dict[str, typing.Any]:
    with open(os.path.join(directory, MANIFEST_NAME), encoding="utf8") as handle:
        return yaml.safe_load(handle)


def _plain(value: typing.Any) -> typing.Any:
    if isinstance(value, str):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.generic):
        return value.item()
    return value
