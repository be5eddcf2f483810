"""Check records shared by the verification suites: {identity, indices, status[, detail]}."""

from .errors import TruncationOverflow
from .series import QLogSeries


def is_zero(x):
    if hasattr(x, "is_zero"):
        return x.is_zero()
    if isinstance(x, dict):
        return all(is_zero(v) for v in x.values())
    if isinstance(x, (list, tuple)):
        return all(is_zero(v) for v in x)
    return not x


def summary(x):
    if isinstance(x, QLogSeries):
        return "; ".join(f"q^{e} log^{k}: {c}" for e, k, c in x.terms()[:4])
    if isinstance(x, dict):
        return "; ".join(f"{k}: {summary(v)}" for k, v in x.items() if not is_zero(v))
    return str(x)


def report(identity, indices, fn):
    """Run fn; a zero (or True) result passes, TruncationOverflow is SKIPPED."""
    try:
        residual = fn()
    except TruncationOverflow as exc:
        return {"identity": identity, "indices": indices, "status": "SKIPPED", "detail": str(exc)}
    if residual is True:
        ok = True
    elif residual is False:
        ok = False
    else:
        ok = is_zero(residual)
    out = {"identity": identity, "indices": indices, "status": "PASS" if ok else "FAIL"}
    if not ok:
        out["detail"] = "check returned False" if residual is False else summary(residual)
    return out


def summarize(reports):
    counts = {"PASS": 0, "FAIL": 0, "SKIPPED": 0}
    for r in reports:
        counts[r["status"]] += 1
    return counts
