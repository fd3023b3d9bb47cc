import json
import logging
import time
from dataclasses import dataclass
from typing import List

from construct import (build_set, certify, default_choice_code, digit_candidates, enumerate_certified_sets,
                       family_total)
from epsilon import compute_epsilon, epsilon_to_dict
from errors import SidonError, ValidationError
from gadic import gadic_digits, gadic_sidon_set, level_threshold, min_level, scan_levels
from model import render_choice_code
from multiindex import (count_multiindices, enumerate_difference_vectors, enumerate_multiindices, lower_witness,
                        reduced_difference_vectors, upper_witness)
from realnum import ThetaSystem, render_decimal
from verify import verify_set

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
DEFAULT_FAMILY_LIMIT = 1024


@dataclass
class OutputDocument:
    command: str
    inputs: dict
    result: dict
    timing_ms: float = 0.0
    schema_version: str = SCHEMA_VERSION

    def to_dict(self, timing=True):
        out = {"schema_version": self.schema_version, "command": self.command,
               "inputs": self.inputs, "result": self.result}
        if timing:
            out["timing_ms"] = self.timing_ms
        return out

    def to_json(self, timing=True):
        return json.dumps(self.to_dict(timing), sort_keys=True, indent=2)

    @property
    def error(self):
        return self.result.get("error")


def _witness_dict(witness_fn, h, n):
    try:
        x, y = witness_fn(h, n)
    except ValidationError as e:
        return {"unavailable": str(e)}
    return {"x": list(x.coords), "y": list(y.coords)}


def load_point_sets(text: str) -> List[list]:
    """Point sets from a JSON document or from text with one point per line.

    JSON may be {"d": int, "sets": [[[int, ...], ...], ...]} or the output of
    `generate` / `gadic`. In text, a blank line starts a new set.
    """
    text = text.strip()
    if not text:
        raise ValidationError("no points given")
    if text[0] in '{[':
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"invalid JSON point file: {e}")
        if isinstance(doc, dict) and "result" in doc:
            if "error" in doc["result"]:
                raise ValidationError(f"input document is an error: {doc['result']['error'].get('message')}")
            doc = doc["result"]
        raw = doc.get("sets") if isinstance(doc, dict) else doc
        if not isinstance(raw, list):
            raise ValidationError("point file needs a 'sets' list")
        sets = [entry["set"] if isinstance(entry, dict) else entry for entry in raw]
    else:
        sets, current = [], []
        for line in text.splitlines():
            if not line.strip():
                if current:
                    sets.append(current)
                    current = []
                continue
            try:
                current.append([int(c) for c in line.split()])
            except ValueError:
                raise ValidationError(f"malformed point line: {line!r}")
        if current:
            sets.append(current)
    return [_simplify(points) for points in sets]


def parse_inline_points(text: str) -> list:
    """Whitespace-separated points; coordinates of one point joined by ','."""
    try:
        points = [[int(c) for c in token.split(',')] for token in text.split()]
    except ValueError:
        raise ValidationError(f"malformed points: {text!r}")
    if not points:
        raise ValidationError("no points given")
    return _simplify(points)


def _simplify(points):
    if all(isinstance(p, list) and len(p) == 1 for p in points):
        return [p[0] for p in points]
    return points


class CommandHandler:
    def __init__(self, cap=None, precision_max=None, digits=15, workers=None):
        self.cap = cap
        self.precision_max = precision_max
        self.digits = digits
        self.workers = workers

    def process_request(self, command: str, inputs: dict) -> OutputDocument:
        """Run one command and wrap its result (or error) in an OutputDocument."""
        logger.info(f"Processing {command} request")
        handlers = {
            'xhn': self.handle_xhn,
            'epsilon': self.handle_epsilon,
            'generate': self.handle_generate,
            'gadic': self.handle_gadic,
            'verify': self.handle_verify,
        }
        start = time.perf_counter()
        handler = handlers.get(command)
        try:
            if handler is None:
                raise ValidationError(f"Unknown command: {command}")
            result = handler(**inputs)
        except SidonError as e:
            logger.error(f"{command} failed: {e}")
            result = {"error": e.to_dict()}
        except Exception as e:
            logger.exception(f"Unexpected error processing {command}")
            result = {"error": {"type": type(e).__name__, "message": str(e), "exit_code": 1}}
        elapsed = (time.perf_counter() - start) * 1000
        logger.info(f"Finished {command} in {elapsed:.1f} ms")
        return OutputDocument(command=command, inputs=inputs, result=result, timing_ms=round(elapsed, 3))

    @staticmethod
    def exit_code(doc: OutputDocument) -> int:
        return doc.error["exit_code"] if doc.error else 0

    def _system(self, theta, independence_claim=True):
        return ThetaSystem.parse(theta, independence_claim)

    def handle_xhn(self, h, n, listing=False, diffs=False):
        count = count_multiindices(h, n)
        result = {"h": h, "n": n, "count": count,
                  "lower_witness": _witness_dict(lower_witness, h, n),
                  "upper_witness": _witness_dict(upper_witness, h, n)}
        if listing:
            result["multi_indices"] = [x.coords for x in enumerate_multiindices(h, n, self.cap)]
        if diffs:
            full = enumerate_difference_vectors(h, n, self.cap)
            result["difference_vectors"] = [z.coords for z in full]
            result["primitive_difference_vectors"] = [z.coords for z in reduced_difference_vectors(h, n, self.cap)]
        return result

    def handle_epsilon(self, theta, h, m=1):
        system = self._system(theta)
        eps = compute_epsilon(system, h, precision_max=self.precision_max, cap=self.cap)
        return {"theta": system.render(),
                "epsilon": epsilon_to_dict(eps, self.digits, m),
                "theta_norm_hi": render_decimal(eps.theta_norm_hi, self.digits, "ceil")}

    def _certificate(self, cert):
        out = cert.to_dict()
        if cert.eps_bound is not None:
            eps = epsilon_to_dict(cert.eps_bound, self.digits)
            out["eps"] = {k: eps[k] for k in ("lo", "hi", "lo_exact", "hi_exact", "argmin", "precision_bits")}
        return out

    def handle_generate(self, theta, h, m=1, q=None, enumerate_all=False, limit=DEFAULT_FAMILY_LIMIT, seed=None,
                        force=False, code=None, positivity=False, independence_claim=True):
        system = self._system(theta, independence_claim)
        params, cert, q_min = certify(system, h, m, q, force=force, positivity_mode=positivity,
                                      precision_max=self.precision_max, cap=self.cap)
        candidates = digit_candidates(system, params.q, m, precision_max=self.precision_max)
        usable = family_total(candidates, positivity)
        if enumerate_all:
            sets = enumerate_certified_sets(system, h, m, params.q, limit, seed=seed, positivity_mode=positivity,
                                            precision_max=self.precision_max, certificate=cert)
        else:
            if code is None:
                code = default_choice_code(candidates, positivity)
            sets = [build_set(candidates, code, h=h, positivity_mode=positivity, q_checked=True)]
        return {
            "theta": system.render(),
            "d": system.d,
            "q_min": q_min,
            "certified": cert.certified,
            "certificate": self._certificate(cert),
            "candidates": [[list(c) for c in row] for row in candidates.values],
            "family_size": candidates.family_size,
            "usable_codes": usable,
            "sampled": enumerate_all and len(sets) < usable,
            "seed": seed,
            "sets": [{"set": [list(p) for p in s.points],
                      "choice_code": render_choice_code(s.choice_code, m)} for s in sets],
        }

    def handle_gadic(self, theta, g, level=None, auto_level=False, h=2, scan=None, independence_claim=True):
        if not isinstance(g, int) or g < 2:
            raise ValidationError(f"g must be an integer >= 2, got {g!r}")
        system = self._system(theta, independence_claim)
        if level is None and not auto_level and not scan:
            raise ValidationError("give a level, --auto-level or --scan")
        eps = None
        threshold = None
        if system.n > 1:
            eps = compute_epsilon(system, h, precision_max=self.precision_max, cap=self.cap)
            threshold = render_decimal(level_threshold(eps, h), self.digits, "ceil")
        result = {"theta": system.render(), "g": g, "h": h,
                  "threshold_upper": threshold,
                  "min_level": min_level(system, g, h, eps=eps, precision_max=self.precision_max)}
        if auto_level:
            level = result["min_level"]
        if level is not None:
            lattice, cert = gadic_sidon_set(system, g, level, h=h, eps=eps, precision_max=self.precision_max)
            result.update(level=level, q=g ** level, certified=cert.certified,
                          certificate=self._certificate(cert),
                          sets=[{"set": [list(p) for p in lattice.points],
                                 "choice_code": render_choice_code(lattice.choice_code, 1)}])
            result["digits"] = [gadic_digits(v[0], g, level, self.precision_max)._asdict() for v in system.vectors]
        if scan:
            result["scan"] = scan_levels(system, g, scan, h=h, eps=eps, precision_max=self.precision_max)
        return result

    def handle_verify(self, h, sets):
        reports = []
        for points in sets:
            report = verify_set(points, h, cap=self.cap, workers=self.workers)
            elements = points if all(isinstance(p, int) for p in points) else [tuple(p) for p in points]
            reports.append(report.to_dict(elements=elements))
        logger.info(f"Verified {len(reports)} sets")
        return {"h": h, "set_count": len(reports), "all_bh": all(r["is_bh"] for r in reports), "reports": reports}


def render_text(doc: OutputDocument) -> str:
    """Short human-readable summary of a document."""
    r = doc.result
    if doc.error:
        return f"error ({doc.error['type']}): {doc.error['message']}"
    if doc.command == 'xhn':
        lines = [f"|X_{{{r['h']},{r['n']}}}| = {r['count']}"]
        lines += [str(tuple(x)) for x in r.get("multi_indices", [])]
        lines += [f"diff {tuple(z)}" for z in r.get("difference_vectors", [])]
        return '\n'.join(lines)
    if doc.command == 'epsilon':
        e = r["epsilon"]
        return (f"epsilon in [{e['lo']}, {e['hi']}]  argmin {tuple(e['argmin'])}  "
                f"q_min(m={e['m']}) = {e['q_min']}")
    if doc.command in ('generate', 'gadic'):
        lines = [f"certified: {r.get('certified')}"]
        lines += [f"{s['choice_code']}  {s['set']}" for s in r.get("sets", [])]
        lines += [f"level {row['level']}: {row['points']} certified={row['certified']} bh={row['is_bh']}"
                  for row in r.get("scan", [])]
        return '\n'.join(lines)
    if doc.command == 'verify':
        return '\n'.join(f"is_bh={rep['is_bh']}  |hA|={rep['sumset_size']}/{rep['expected_max']}"
                         for rep in r["reports"])
    return doc.to_json()
