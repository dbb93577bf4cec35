import logging
import os
import typing


class undefined:
    pass


class LogLevel(str):
    """
    A `BGL_LOG` value. Accepts the short names used on the command line and
    exposes the matching `logging` level.
    """

    levels = {
        "error": logging.ERROR,
        "warn": logging.WARNING,
        "warning": logging.WARNING,
        "info": logging.INFO,
        "debug": logging.DEBUG,
    }

    def __new__(cls, value: str) -> "LogLevel":
        name = str(value).strip().lower()
        if name not in cls.levels:
            choices = ", ".join(sorted(set(cls.levels) - {"warning"}))
            raise ValueError(f"Unknown log level '{value}'. Expected one of: {choices}.")
        return str.__new__(cls, name)  # type: ignore

    @property
    def level(self) -> int:
        return self.levels[str(self)]


class Config:
    """
    Settings are looked up in the environment first, then in the optional
    ".env" file, then fall back to the declared default. Keys are namespaced
    with `prefix`, so `config("LOG")` reads `BGL_LOG`.
    """

    def __init__(
        self,
        env_file: str = None,
        environ: typing.Mapping[str, str] = os.environ,
        prefix: str = "BGL_",
    ) -> None:
        self.environ = environ
        self.prefix = prefix
        self.file_values = {}  # type: typing.Dict[str, str]
        if env_file is not None and os.path.isfile(env_file):
            self.file_values = self._read_file(env_file)

    def __call__(
        self, key: str, cast: type = None, default: typing.Any = undefined
    ) -> typing.Any:
        return self.get(key, cast, default)

    def get(
        self, key: str, cast: type = None, default: typing.Any = undefined
    ) -> typing.Any:
        name = self.prefix + key
        if name in self.environ:
            value = self.environ[name]
            return self._perform_cast(name, value, cast)
        if name in self.file_values:
            value = self.file_values[name]
            return self._perform_cast(name, value, cast)
        if default is not undefined:
            return self._perform_cast(name, default, cast)
        raise KeyError(f"Config '{name}' is missing, and has no default.")

    def _read_file(self, file_name: str) -> typing.Dict[str, str]:
        file_values = {}  # type: typing.Dict[str, str]
        with open(file_name) as input_file:
            for line in input_file.readlines():
                line = line.strip()
                if "=" in line and not line.startswith("#"):
                    key, value = line.split("=", 1)
                    key = key.strip()
                    value = value.strip().strip("\"'")
                    file_values[key] = value
        return file_values

    def _perform_cast(
        self, key: str, value: typing.Any, cast: type = None
    ) -> typing.Any:
        if cast is None or value is None:
            return value
        elif cast is bool and isinstance(value, str):
            mapping = {"true": True, "1": True, "false": False, "0": False}
            value = value.lower()
            if value not in mapping:
                raise ValueError(
                    f"Config '{key}' has value '{value}'. Not a valid bool."
                )
            return mapping[value]
        try:
            return cast(value)
        except (TypeError, ValueError):
            raise ValueError(
                f"Config '{key}' has value '{value}'. Not a valid {cast.__name__}."
            )


class Settings(typing.NamedTuple):
    log_level: LogLevel
    jobs: int


def load_settings(config: Config) -> Settings:
    jobs = config("JOBS", cast=int, default=1)
    if jobs < 1:
        raise ValueError(f"Config 'BGL_JOBS' has value '{jobs}'. Must be at least 1.")
    return Settings(log_level=config("LOG", cast=LogLevel, default="warn"), jobs=jobs)
