import math


class Stats:
    @staticmethod
    def mean(values):
        return math.fsum(values) / len(values)

    @staticmethod
    def quotient(a, b):
        if b == 0:
            raise ZeroDivisionError("/ by zero")
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
