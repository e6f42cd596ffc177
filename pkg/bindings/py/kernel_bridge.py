"""Line-protocol bridge exposing the loss kernels and scheduler handles.

Speaks newline-delimited JSON over stdin/stdout. Each request carries an
``id`` echoed in the response, so callers may pipeline. Responses are
either ``{"id": ..., "ok": true, ...}`` or
``{"id": ..., "ok": false, "code": ..., "message": ...}``; the process
never crashes on a bad request. Floats serialize via shortest-repr, so
64-bit values round-trip bit-exactly in both directions.

Ops:
    dphr_loss     view_a, view_b (flat row-major), rows, cols, margin,
                  w_min, w_max, lambda, normalize, direction
                  -> loss, grad_a, grad_b (flat row-major)
    palw_create   window, sigma_min, sigma_max, delta_min, delta_max,
                  gamma, beta -> handle
    palw_step     handle, loss -> t, alpha, alpha_hat, lambda_inst, lambda
    palw_destroy  handle
    stats         -> live_handles, rss_bytes
    shutdown
"""

import json
import os
import sys

import numpy as np

from dphr import (
    DimensionError,
    EmbeddingBatch,
    PalwConfig,
    PalwState,
    ValidationError,
    grad_dphr,
    palw_step,
)

_SCHEDULERS: dict[int, PalwState] = {}
_NEXT_HANDLE = 1


class InvalidHandle(Exception):
    def __init__(self, handle):
        self.handle = handle
        super().__init__(f"no scheduler with handle {handle}")


def _rss_bytes() -> int:
    with open("/proc/self/statm") as fh:
        resident_pages = int(fh.read().split()[1])
    return resident_pages * os.sysconf("SC_PAGE_SIZE")


def _as_matrix(name: str, flat, rows: int, cols: int) -> np.ndarray:
    if not isinstance(flat, list):
        raise DimensionError(f"{name} must be a flat array")
    if len(flat) != rows * cols:
        raise DimensionError(
            f"{name} has {len(flat)} values, expected rows*cols = {rows * cols}"
        )
    return np.array(flat, dtype=np.float64).reshape(rows, cols)


def _op_dphr_loss(req: dict) -> dict:
    rows, cols = int(req["rows"]), int(req["cols"])
    view_a = _as_matrix("view_a", req["view_a"], rows, cols)
    view_b = _as_matrix("view_b", req["view_b"], rows, cols)
    batch = EmbeddingBatch(view_a, view_b)
    loss, grads = grad_dphr(
        batch,
        margin=float(req.get("margin", 0.3)),
        w_min=float(req.get("w_min", 0.5)),
        w_max=float(req.get("w_max", 2.0)),
        lambda_t=float(req.get("lambda", 1.0)),
        normalize=bool(req.get("normalize", True)),
        direction=str(req.get("direction", "both")),
    )
    return {
        "loss": loss,
        "grad_a": grads.grad_a.ravel().tolist(),
        "grad_b": grads.grad_b.ravel().tolist(),
    }


def _op_palw_create(req: dict) -> dict:
    global _NEXT_HANDLE
    cfg = PalwConfig(
        window=int(req.get("window", 16)),
        sigma_min=float(req.get("sigma_min", 0.8)),
        sigma_max=float(req.get("sigma_max", 1.5)),
        delta_min=float(req.get("delta_min", 0.2)),
        delta_max=float(req.get("delta_max", 1.0)),
        gamma=float(req.get("gamma", 1.5)),
        beta=float(req.get("beta", 0.9)),
    )
    handle = _NEXT_HANDLE
    _NEXT_HANDLE += 1
    _SCHEDULERS[handle] = PalwState(cfg)
    return {"handle": handle}


def _get_state(req: dict) -> tuple[int, PalwState]:
    handle = int(req.get("handle", -1))
    state = _SCHEDULERS.get(handle)
    if state is None:
        raise InvalidHandle(handle)
    return handle, state


def _op_palw_step(req: dict) -> dict:
    _, state = _get_state(req)
    lam, trace = palw_step(state, float(req["loss"]))
    return {
        "t": trace.t,
        "alpha": trace.alpha,
        "alpha_hat": trace.alpha_hat,
        "lambda_inst": trace.lambda_inst,
        "lambda": lam,
    }


def _op_palw_destroy(req: dict) -> dict:
    handle, _ = _get_state(req)
    del _SCHEDULERS[handle]
    return {}


def _op_stats(_req: dict) -> dict:
    return {"live_handles": len(_SCHEDULERS), "rss_bytes": _rss_bytes()}


_OPS = {
    "dphr_loss": _op_dphr_loss,
    "palw_create": _op_palw_create,
    "palw_step": _op_palw_step,
    "palw_destroy": _op_palw_destroy,
    "stats": _op_stats,
}


def handle_line(line: str) -> tuple[dict, bool]:
    """Process one request line; returns (response, keep_running)."""
    try:
        req = json.loads(line)
    except json.JSONDecodeError as exc:
        return {"id": None, "ok": False, "code": "bad_request", "message": str(exc)}, True

    rid = req.get("id")
    op = req.get("op")
    if op == "shutdown":
        return {"id": rid, "ok": True}, False
    fn = _OPS.get(op)
    if fn is None:
        return {"id": rid, "ok": False, "code": "bad_request",
                "message": f"unknown op {op!r}"}, True
    try:
        result = fn(req)
    except InvalidHandle as exc:
        return {"id": rid, "ok": False, "code": "invalid_handle", "message": str(exc)}, True
    except DimensionError as exc:
        return {"id": rid, "ok": False, "code": "shape_error", "message": str(exc)}, True
    except ValidationError as exc:
        return {"id": rid, "ok": False, "code": "validation_error", "message": str(exc)}, True
    except (TypeError, ValueError, KeyError) as exc:
        return {"id": rid, "ok": False, "code": "bad_request", "message": repr(exc)}, True
    return {"id": rid, "ok": True, **result}, True


def main() -> None:
    out = sys.stdout
    for line in sys.stdin:
        if not line.strip():
            continue
        response, keep_running = handle_line(line)
        out.write(json.dumps(response) + "\n")
        out.flush()
        if not keep_running:
            return


if __name__ == "__main__":
    main()
