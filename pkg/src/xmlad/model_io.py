"""Model persistence: exact round-trips for the detector and the baselines.

Each model kind gets its own container header (xmlad-adifa, xmlad-pga, ...).
All floats survive serialization exactly, and kernel sums iterate stored
values in stored order, so a loaded model reproduces classification outputs
bit for bit.
"""

import numpy as np

from . import persist
from .adifa import AdifaModel, AttributeModel
from .baselines import GdeModel, LofModel, PgaModel
from .errors import CorruptFile, VersionMismatch


def _floats(arr):
    return [float(v) for v in np.asarray(arr).ravel()]


def _matrix(arr):
    return [[float(v) for v in row] for row in np.asarray(arr)]


def _opt_floats(arr):
    return None if arr is None else _floats(arr)


def _adifa_body(model: AdifaModel) -> dict:
    return {
        "psi": model.psi,
        "threshold": model.threshold,
        "column_names": list(model.column_names),
        "attributes": [
            {"values": _floats(a.values), "sigma": a.sigma, "tau": a.tau,
             "norm": a.norm, "weight": a.weight, "entropy": a.entropy}
            for a in model.attributes
        ],
        "training_scores": _floats(model.training_scores),
        "meta_sigma": model.meta_sigma,
        "meta_tau": model.meta_tau,
        "meta_norm": model.meta_norm,
        "calibration_max": model.calibration_max,
    }


def _adifa_from_body(body: dict) -> AdifaModel:
    return AdifaModel(
        attributes=[
            AttributeModel(values=np.array(a["values"], dtype=float),
                           sigma=a["sigma"], tau=a["tau"], norm=a["norm"],
                           weight=a["weight"], entropy=a["entropy"])
            for a in body["attributes"]
        ],
        psi=body["psi"],
        training_scores=np.array(body["training_scores"], dtype=float),
        meta_sigma=body["meta_sigma"], meta_tau=body["meta_tau"],
        meta_norm=body["meta_norm"],
        calibration_max=body["calibration_max"],
        threshold=body["threshold"],
        column_names=tuple(body["column_names"]),
    )


def _pga_body(m: PgaModel) -> dict:
    return {"training_points": _matrix(m.training_points),
            "nn_distances": _floats(m.nn_distances), "alpha": m.alpha,
            "k": m.k, "cutoff": m.cutoff,
            "mu": _opt_floats(m.mu), "sd": _opt_floats(m.sd)}


def _pga_from_body(b: dict) -> PgaModel:
    return PgaModel(training_points=np.array(b["training_points"], dtype=float),
                    nn_distances=np.array(b["nn_distances"], dtype=float),
                    alpha=b["alpha"], k=b["k"], cutoff=b["cutoff"],
                    mu=None if b["mu"] is None else np.array(b["mu"]),
                    sd=None if b["sd"] is None else np.array(b["sd"]))


def _gde_body(m: GdeModel) -> dict:
    return {"training_points": _matrix(m.training_points), "radius": m.radius,
            "mean_neighbors": m.mean_neighbors,
            "std_neighbors": m.std_neighbors, "sign_mode": m.sign_mode,
            "mu": _opt_floats(m.mu), "sd": _opt_floats(m.sd)}


def _gde_from_body(b: dict) -> GdeModel:
    return GdeModel(training_points=np.array(b["training_points"], dtype=float),
                    radius=b["radius"], mean_neighbors=b["mean_neighbors"],
                    std_neighbors=b["std_neighbors"], sign_mode=b["sign_mode"],
                    mu=None if b["mu"] is None else np.array(b["mu"]),
                    sd=None if b["sd"] is None else np.array(b["sd"]))


def _lof_body(m: LofModel) -> dict:
    return {"training_points": _matrix(m.training_points),
            "min_pts": m.min_pts, "k_distances": _floats(m.k_distances),
            "lrd": _floats(m.lrd), "training_lof": _floats(m.training_lof),
            "lof_max": m.lof_max,
            "mu": _opt_floats(m.mu), "sd": _opt_floats(m.sd)}


def _lof_from_body(b: dict) -> LofModel:
    return LofModel(training_points=np.array(b["training_points"], dtype=float),
                    min_pts=b["min_pts"],
                    k_distances=np.array(b["k_distances"], dtype=float),
                    lrd=np.array(b["lrd"], dtype=float),
                    training_lof=np.array(b["training_lof"], dtype=float),
                    lof_max=b["lof_max"],
                    mu=None if b["mu"] is None else np.array(b["mu"]),
                    sd=None if b["sd"] is None else np.array(b["sd"]))


_KINDS = {
    AdifaModel: ("adifa", _adifa_body),
    PgaModel: ("pga", _pga_body),
    GdeModel: ("gde", _gde_body),
    LofModel: ("lof", _lof_body),
}

_LOADERS = {
    "adifa": _adifa_from_body,
    "pga": _pga_from_body,
    "gde": _gde_from_body,
    "lof": _lof_from_body,
}


def save_model(model, path) -> None:
    try:
        kind, encode = _KINDS[type(model)]
    except KeyError:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    persist.write(path, kind, encode(model))


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    header = text.split("\n", 1)[0]
    for kind, loader in _LOADERS.items():
        if header.startswith(f"xmlad-{kind} v"):
            return kind, loader(persist.loads(kind, text))
    if header.startswith("xmlad-"):
        raise VersionMismatch(f"unknown model header {header!r}")
    raise CorruptFile("not an xmlad model file")
