import math
import typing


class Convertor:
    """
    Parses a command line or file token into a value, and renders a value back
    into the text used in CSV, JSON and manifest files.
    """

    name = ""

    def convert(self, value: str) -> typing.Any:
        raise NotImplementedError()  # pragma: no cover

    def to_string(self, value: typing.Any) -> str:
        raise NotImplementedError()  # pragma: no cover

    def __call__(self, value: str) -> typing.Any:
        # argparse reports the `__name__`-less callable by its repr.
        return self.convert(value)

    def __repr__(self) -> str:
        return self.name or self.__class__.__name__


class FloatConvertor(Convertor):
    name = "float"

    def convert(self, value: str) -> typing.Any:
        result = float(value)
        if math.isnan(result) or math.isinf(result):
            raise ValueError(f"Non-finite value {value!r} is not supported.")
        return result

    def to_string(self, value: typing.Any) -> str:
        value = float(value)
        assert not math.isnan(value), "NaN values are not supported"
        assert not math.isinf(value), "Infinite values are not supported"
        # repr() is the shortest decimal string that reads back to the same double.
        return repr(value)


class PositiveFloatConvertor(FloatConvertor):
    name = "positive float"

    def convert(self, value: str) -> typing.Any:
        result = super().convert(value)
        if result <= 0.0:
            raise ValueError(f"Expected a positive number, got {value!r}.")
        return result


class ProbabilityConvertor(FloatConvertor):
    name = "probability"

    def convert(self, value: str) -> typing.Any:
        result = super().convert(value)
        if not 0.0 < result < 1.0:
            raise ValueError(f"Expected a value in (0, 1), got {value!r}.")
        return result


class FractionConvertor(FloatConvertor):
    name = "fraction"

    def convert(self, value: str) -> typing.Any:
        result = super().convert(value)
        if not 0.0 < result <= 1.0:
            raise ValueError(f"Expected a value in (0, 1], got {value!r}.")
        return result


class IntegerConvertor(Convertor):
    name = "int"
    minimum = 0

    def convert(self, value: str) -> typing.Any:
        result = int(value)
        if result < self.minimum:
            raise ValueError(f"Expected an integer >= {self.minimum}, got {value!r}.")
        return result

    def to_string(self, value: typing.Any) -> str:
        return str(int(value))


class PositiveIntegerConvertor(IntegerConvertor):
    name = "positive int"
    minimum = 1


class PolarityConvertor(IntegerConvertor):
    name = "polarity"

    def convert(self, value: str) -> typing.Any:
        result = int(float(value))
        if result not in (-1, 1) or float(value) != result:
            raise ValueError(f"Polarity must be -1 or 1, got {value!r}.")
        return result


CONVERTOR_TYPES = {
    "float": FloatConvertor(),
    "positive_float": PositiveFloatConvertor(),
    "probability": ProbabilityConvertor(),
    "fraction": FractionConvertor(),
    "int": IntegerConvertor(),
    "positive_int": PositiveIntegerConvertor(),
    "polarity": PolarityConvertor(),
}
