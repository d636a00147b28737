from __future__ import annotations

import importlib
import inspect
import keyword
import logging
import os
from enum import IntEnum
from pathlib import Path
from types import UnionType
from typing import TYPE_CHECKING, Any, TypeVar, Union, get_args, get_origin

from dotenv import dotenv_values

from .context import Context
from .exceptions import (
    CogLoadError,
    CommandExecError,
    FloatConvertError,
    IntConvertError,
    ParamParseError,
    QFeedError,
    UsageError,
    exit_code_for,
)
from .models.config import RunConfig

if TYPE_CHECKING:
    from collections.abc import Awaitable, Callable, Sequence

__all__ = ("App", "BaseApp", "Cog")

PathOrClass = TypeVar("PathOrClass", str, type["Cog"])

DEFAULT_COGS = (
    "qfeed.cogs.steady",
    "qfeed.cogs.sweep",
    "qfeed.cogs.traj",
    "qfeed.cogs.qfunc",
    "qfeed.cogs.validate",
)


class ParamType(IntEnum):
    INTEGER = 1
    FLOAT = 2
    STRING = 3
    BOOLEAN = 4
    UNKNOWN = 5


def _normalize_key(key: str) -> str:
    name = key.strip().lower().replace("-", "_")
    return f"{name}_" if keyword.iskeyword(name) else name


class BaseApp:
    def __init__(self, *, out_dir: str | None = None, jobs: int | None = None) -> None:
        self.cogs: list[Cog] = []
        self.out_dir = out_dir or os.getenv("QFEED_OUT", "out")
        self.jobs = jobs or int(os.getenv("QFEED_JOBS", "1"))

    @staticmethod
    def _setup_logging(out_dir: Path, log_to_stream: bool) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        handlers: list[logging.Handler] = [logging.FileHandler(out_dir / "qfeed.log", encoding="utf-8")]
        if log_to_stream:
            handlers.append(logging.StreamHandler())
        logging.basicConfig(
            level=logging.INFO,
            format="%(asctime)s %(levelname)s %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
            handlers=handlers,
            force=True,
        )

    @staticmethod
    def _parse_argv(argv: Sequence[str]) -> tuple[str | None, dict[str, str | None]]:
        """Splits a command line into the subcommand and its flags.

        ``--key value`` and ``--key=value`` both set a flag; a flag followed by
        another flag or by nothing is set to ``true``. The literal value ``None``
        becomes None.

        Args:
            argv: The arguments after the program name.

        Returns:
            The subcommand (None if absent) and the flags, keys normalized.

        Raises:
            UsageError: If a stray positional argument is found.
        """
        args = list(argv)
        cmd = None
        if args and not args[0].startswith("--"):
            cmd = args.pop(0)

        data: dict[str, str | None] = {}
        i = 0
        while i < len(args):
            arg = args[i]
            if not arg.startswith("--") or arg == "--":
                raise UsageError(f"unexpected argument {arg!r}")
            key, sep, value = arg[2:].partition("=")
            if not sep:
                following = args[i + 1] if i + 1 < len(args) else None
                if following is None or following.startswith("--"):
                    value = "true"
                else:
                    value = following
                    i += 1
            data[_normalize_key(key)] = None if value == "None" else value
            i += 1
        return cmd, data

    @staticmethod
    def _load_config(path: str) -> dict[str, str | None]:
        """Reads a flat ``KEY=value`` file; keys are normalized like flags.

        Raises:
            UsageError: If the file does not exist.
        """
        if not Path(path).is_file():
            raise UsageError(f"config file {path} not found")
        return {
            _normalize_key(key): None if value == "None" else value
            for key, value in dotenv_values(path).items()
        }

    @staticmethod
    def __get_param_type(annotation: Any) -> ParamType:
        # Check if it's an Optional or Union with None
        origin = get_origin(annotation)
        args = get_args(annotation)

        if (origin is Union or origin is UnionType) and type(None) in args:
            annotation = next((arg for arg in args if arg is not type(None)), None)
        elif isinstance(annotation, str) and annotation.endswith(" | None"):
            annotation = annotation.removesuffix(" | None")

        # Now check the base type
        if annotation in {"int", int}:
            return ParamType.INTEGER
        if annotation in {"bool", bool}:
            return ParamType.BOOLEAN
        if annotation in {"float", float}:
            return ParamType.FLOAT
        if annotation in {"str", str}:
            return ParamType.STRING
        return ParamType.UNKNOWN

    @staticmethod
    def _parse_params(
        params: dict[str, inspect.Parameter],
        data: dict[str, str | None],
        annotations: dict[str, Any],
    ) -> dict[str, Any]:
        known = list(params.values())[2:]
        unknown = set(data) - {param.name for param in known}
        if unknown:
            raise UsageError(f"unknown option(s): {', '.join(sorted(unknown))}")

        kwargs: dict[str, Any] = {}
        for param in known:
            default = None if param.default == inspect.Parameter.empty else param.default
            if param.name not in data:
                kwargs[param.name] = default
                continue

            value: Any = data[param.name]
            if value is not None:
                param_type = BaseApp.__get_param_type(annotations[param.name])

                if param_type is ParamType.INTEGER:
                    try:
                        value = int(value)
                    except ValueError as e:
                        raise IntConvertError(param.name, value) from e
                elif param_type is ParamType.FLOAT:
                    try:
                        value = float(value)
                    except ValueError as e:
                        raise FloatConvertError(param.name, value) from e
                elif param_type is ParamType.BOOLEAN:
                    if value.lower() in {"true", "1", "yes"}:
                        value = True
                    elif value.lower() in {"false", "0", "no"}:
                        value = False
                    else:
                        raise UsageError(f"{param.name} expects true or false, got {value!r}")
            kwargs[param.name] = value
        return kwargs

    def get_command(self, cmd: str) -> Callable[..., Awaitable[None]] | None:
        for cog in self.cogs:
            func = cog.commands.get(cmd)
            if func:
                return func
        return None

    @property
    def command_names(self) -> list[str]:
        return sorted(name for cog in self.cogs for name in cog.commands)

    async def process_command(self, argv: Sequence[str]) -> Any:
        """Runs one command line.

        Config-file values are applied first and command-line flags override them.

        Args:
            argv: The arguments after the program name.

        Raises:
            UsageError: If the subcommand or an option is unknown.
            CommandExecError: If an error occurs while executing the command.
            ParamParseError: If an error occurs while parsing the parameters of the command.
        """
        cmd, flags = self._parse_argv(argv)
        if cmd is None:
            raise UsageError(f"missing subcommand, expected one of {', '.join(self.command_names)}")
        func = self.get_command(cmd)
        if func is None:
            raise UsageError(f"unknown subcommand {cmd!r}, expected one of {', '.join(self.command_names)}")

        data: dict[str, str | None] = {}
        if flags.get("config"):
            data.update(self._load_config(flags["config"]))  # pyright: ignore[reportArgumentType]
        data.update(flags)

        out_dir = Path(data.pop("out", None) or self.out_dir)
        jobs_text = data.pop("jobs", None)
        quiet = (data.pop("quiet", None) or "false").lower() == "true"
        data.pop("config", None)
        try:
            jobs = int(jobs_text) if jobs_text else self.jobs
        except ValueError as e:
            raise ParamParseError(cmd, IntConvertError("jobs", jobs_text)) from e
        if jobs < 1:
            raise UsageError("jobs must be at least 1")

        try:
            self._setup_logging(out_dir, log_to_stream=not quiet)
        except OSError as e:
            raise UsageError(f"cannot write to the output directory {out_dir}: {e}") from e

        sig = inspect.signature(func.original_function)  # pyright: ignore[reportFunctionMemberAccess]
        try:
            kwargs = self._parse_params(
                dict(sig.parameters),
                data,
                func.original_function.__annotations__,  # pyright: ignore[reportFunctionMemberAccess]
            )
        except Exception as e:
            raise ParamParseError(cmd, e) from e

        ctx = Context(command=cmd, out_dir=out_dir, jobs=jobs)
        config = RunConfig(command=cmd, out=str(out_dir), jobs=jobs, params=kwargs)
        await ctx.echo_config(config)
        logging.info("Running %s with %s", cmd, kwargs)

        try:
            await func(ctx, **kwargs)
        except Exception as e:
            raise CommandExecError(cmd, e) from e
        return ctx

    async def run(self, argv: Sequence[str]) -> int:
        """Runs a command line and returns the process exit code.

        Returns:
            0 on success, 2 for numerical failures and 1 for everything else that stops
            the command, unexpected errors included.
        """
        await self.setup_hook()
        try:
            await self.process_command(argv)
        except QFeedError as e:
            await self.on_error(e)
            return exit_code_for(e)
        except Exception as e:
            logging.exception(e)
            return 1
        finally:
            await self.on_close()
        return 0

    async def on_error(self, error: QFeedError) -> None:  # noqa: PLR6301
        """Handles an error that stopped a command.

        Args:
            error: The error that occurred.
        """
        logging.error("%s", error)

    # user-defined methods

    async def setup_hook(self) -> None:
        """This method is ran before the command is processed."""

    async def on_close(self) -> None:
        """This method is ran after the command finishes, successfully or not."""

    # cog management

    def add_cog(self, path_or_class: PathOrClass) -> None:
        """Adds a cog to the app.

        Args:
            path_or_class: The path to the cog or the cog class itself.

        Raises:
            CogLoadError: If the cog cannot be loaded.
        """
        try:
            if isinstance(path_or_class, str):
                # cog path, example: qfeed.cogs.steady
                module = importlib.import_module(path_or_class)
                # get all classes in the module that is subclass of Cog and not Cog itself
                classes = inspect.getmembers(module, inspect.isclass)
                classes = [
                    class_
                    for class_ in classes
                    if issubclass(class_[1], Cog) and class_[1] is not Cog and class_[1].__module__ == module.__name__
                ]
                if not classes:
                    raise CogLoadError(path_or_class, "No Cog subclass found")
                if len(classes) > 1:
                    raise CogLoadError(path_or_class, "Multiple Cog subclasses found")
                cog_class = classes[0][1]
                self.cogs.append(cog_class(self))
            else:
                self.cogs.append(path_or_class(self))  # type: ignore
        except CogLoadError:
            raise
        except Exception as e:
            raise CogLoadError(path_or_class, e) from e


class App(BaseApp):
    """The ``qfeed`` application with the built-in subcommands loaded."""

    def __init__(self, *, out_dir: str | None = None, jobs: int | None = None) -> None:
        super().__init__(out_dir=out_dir, jobs=jobs)
        for path in DEFAULT_COGS:
            self.add_cog(path)


class Cog:
    def __init__(self, app: BaseApp) -> None:
        self.app = app
        self.commands: dict[str, Callable[..., Awaitable[None]]] = {}
        self.__initialize_commands()

    def __initialize_commands(self) -> None:
        funcs = inspect.getmembers(self, inspect.ismethod)
        funcs = [func for func in funcs if getattr(func[1], "__is_command__", False)]
        self.commands = {func[0]: func[1] for func in funcs}
