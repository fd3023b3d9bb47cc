"""Exception hierarchy shared by every module.

Each class carries the CLI exit code it maps to; json_handler turns a caught
SidonError into an error document with that code.
"""


class SidonError(Exception):
    exit_code = 1

    def to_dict(self):
        return {"type": type(self).__name__, "message": str(self), "exit_code": self.exit_code}


class ValidationError(SidonError, ValueError):
    exit_code = 2


class ThetaParseError(ValidationError):
    def __init__(self, message, text, position):
        super().__init__(f"{message} at position {position} in {text!r}")
        self.text = text
        self.position = position

    def to_dict(self):
        d = super().to_dict()
        d["position"] = self.position
        return d


class DuplicatePointError(ValidationError):
    def __init__(self, point, first_index, second_index):
        super().__init__(f"Duplicate point {list(point)} at positions {first_index} and {second_index}")
        self.point = tuple(point)
        self.indices = (first_index, second_index)


class DimensionTooSmallError(ValidationError):
    def __init__(self, witness, h, n, required):
        super().__init__(f"{witness} witness for h={h} needs n >= {required}, got n={n}")
        self.witness = witness
        self.required = required


class CapExceededError(SidonError):
    exit_code = 3

    def __init__(self, what, count, cap):
        super().__init__(f"{what}: {count} exceeds cap {cap}")
        self.count = count
        self.cap = cap

    def to_dict(self):
        d = super().to_dict()
        d.update(count=self.count, cap=self.cap)
        return d


class PrecisionExhaustedError(SidonError):
    exit_code = 4

    def __init__(self, message, precision_bits, expression=None):
        if precision_bits is not None:
            message = f"{message} (precision {precision_bits} bits)"
        super().__init__(message)
        self.precision_bits = precision_bits
        self.expression = expression

    def to_dict(self):
        d = super().to_dict()
        d["precision_bits"] = self.precision_bits
        if self.expression is not None:
            d["expression"] = str(self.expression)
        return d


class IndependenceUnresolvedError(PrecisionExhaustedError):
    def __init__(self, combination, precision_bits, reason=None):
        coeffs = list(combination)
        message = reason or f"independence unresolved at precision {precision_bits}: combination {coeffs} not bounded away from 0"
        super().__init__(message, None)
        self.precision_bits = precision_bits
        self.combination = tuple(coeffs)

    def to_dict(self):
        d = super().to_dict()
        d["combination"] = list(self.combination)
        return d


class UncertifiedParametersError(SidonError):
    exit_code = 5

    def __init__(self, message, q=None, q_min=None):
        super().__init__(message)
        self.q = q
        self.q_min = q_min

    def to_dict(self):
        d = super().to_dict()
        d.update(q=self.q, q_min=self.q_min)
        return d
