"""Binary model files.

Layout, all integers little-endian::

    8 bytes   magic b"CLABMDL1"
    uint32    format version
    uint32    header length N
    N bytes   UTF-8 JSON header: kind, seed, hyper, meta, and the ordered
              list of [array name, shape]
    ...       float64 little-endian arrays, concatenated in header order

The header's ``seed`` field is the seed the model was trained with, so a
retrain with the stored ``hyper`` reproduces the file.
"""

import json
import struct

import numpy as np

from ..errors import DataError
from ..featurize import HashEmbeddingProvider, TfIdfModel
from ..text import Vocabulary
from .forest import ForestModel, Tree
from .logistic import LogisticModel
from .lstm import LstmClassifier, LstmParams

MAGIC = b"CLABMDL1"
VERSION = 1


def _write(path, kind, hyper, meta, arrays):
    header = {
        "kind": kind,
        "seed": hyper.get("seed"),
        "hyper": hyper,
        "meta": meta,
        "arrays": [[name, list(a.shape)] for name, a in arrays],
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(blob)))
        fh.write(blob)
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def _read(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:8] != MAGIC:
        raise DataError(f"{path}: not a model file")
    version, n = struct.unpack("<II", data[8:16])
    if version != VERSION:
        raise DataError(f"{path}: unsupported model format version {version}")
    header = json.loads(data[16:16 + n].decode("utf-8"))
    arrays = {}
    pos = 16 + n
    for name, shape in header["arrays"]:
        count = int(np.prod(shape)) if shape else 1
        arrays[name] = np.frombuffer(data, dtype="<f8", count=count, offset=pos).reshape(shape).copy()
        pos += 8 * count
    return header, arrays


def save_model(path, model):
    if isinstance(model, LogisticModel):
        _write(path, "logistic", model.hyper, {}, [("weights", model.weights)])
    elif isinstance(model, ForestModel):
        arrays = []
        for k, t in enumerate(model.trees):
            arrays += [(f"t{k}.feature", t.feature.astype(np.float64)),
                       (f"t{k}.threshold", t.threshold),
                       (f"t{k}.left", t.left.astype(np.float64)),
                       (f"t{k}.right", t.right.astype(np.float64)),
                       (f"t{k}.value", t.value.astype(np.float64))]
        _write(path, "forest", model.hyper, {"n_trees": len(model.trees)}, arrays)
    elif isinstance(model, LstmClassifier):
        if not isinstance(model.provider, HashEmbeddingProvider):
            raise DataError("only the built-in hash embedding provider can be serialized")
        p = model.provider
        meta = {"provider": {"dim": p.dim, "seed": p.seed, "scale": p.scale}, "mode": model.mode}
        arrays = [("W", model.cell.W), ("b", model.cell.b), ("readout", model.readout)]
        if model.tfidf_model is not None:
            meta["tfidf"] = {"words": model.tfidf_model.vocab.words, "n_docs": model.tfidf_model.n_docs,
                             "tf_cap": model.tfidf_model.tf_cap}
            arrays.append(("idf", model.tfidf_model.idf))
        _write(path, "lstm", model.hyper, meta, arrays)
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")


def load_model(path):
    header, a = _read(path)
    kind, hyper, meta = header["kind"], header["hyper"], header["meta"]
    if kind == "logistic":
        return LogisticModel(a["weights"], hyper)
    if kind == "forest":
        trees = []
        for k in range(meta["n_trees"]):
            trees.append(Tree(a[f"t{k}.feature"].astype(np.int64), a[f"t{k}.threshold"],
                              a[f"t{k}.left"].astype(np.int64), a[f"t{k}.right"].astype(np.int64),
                              a[f"t{k}.value"].astype(np.int64)))
        return ForestModel(trees, hyper)
    if kind == "lstm":
        prov = HashEmbeddingProvider(**meta["provider"])
        tfidf = None
        if "tfidf" in meta:
            t = meta["tfidf"]
            tfidf = TfIdfModel(Vocabulary(t["words"]), a["idf"], t["n_docs"], t["tf_cap"])
        return LstmClassifier(LstmParams(a["W"], a["b"]), a["readout"], prov, meta["mode"], tfidf, hyper)
    raise DataError(f"unknown model kind {kind!r}")
