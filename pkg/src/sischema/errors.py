"""Exception types. Every error carries a stable ``code`` string."""

from __future__ import annotations


class SchemaError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    def __reduce__(self):
        # keyword-only attributes do not survive the default exception pickling
        return (_rebuild, (type(self), self.args[0] if self.args else "", self.__dict__.copy()))


def _rebuild(cls, message, state):
    exc = cls.__new__(cls)
    Exception.__init__(exc, message)
    exc.__dict__.update(state)
    return exc


class InvariantError(SchemaError):
    """A SIS tree violates a structural invariant."""

    code = "invariant"


class DecodeError(SchemaError):
    """Bytes could not be decoded into a SIS tree.

    Codes: ``malformed``, ``unknown-tag``, ``bad-shape``, ``singleton-union``,
    ``nested-union``, ``duplicate-kind``, ``duplicate-field``.
    """

    code = "malformed"


class RecordError(SchemaError):
    """A dataset record is unusable (not an object, or not valid JSON).

    ``ordinal`` is the 0-based record index within its partition and
    ``offset`` the absolute byte offset of the record in its file, when known.
    """

    code = "bad-record"

    def __init__(
        self,
        message: str,
        code: str | None = None,
        *,
        ordinal: int | None = None,
        offset: int | None = None,
        path: str | None = None,
        partition_id: int | None = None,
    ):
        super().__init__(message, code)
        self.ordinal = ordinal
        self.offset = offset
        self.path = path
        self.partition_id = partition_id

    def __str__(self) -> str:
        where = []
        if self.partition_id is not None:
            where.append(f"partition {self.partition_id}")
        if self.ordinal is not None:
            where.append(f"record {self.ordinal}")
        if self.path is not None:
            where.append(self.path)
        if self.offset is not None:
            where.append(f"byte {self.offset}")
        msg = super().__str__()
        return f"{msg} ({', '.join(where)})" if where else msg


class MetadataError(SchemaError):
    """A declared-schema metadata file is invalid.

    Codes: ``parse``, ``duplicate-field``, ``unknown-type``, ``bad-shape``.
    ``line``/``column`` are set for ``parse`` errors.
    """

    code = "bad-shape"

    def __init__(
        self,
        message: str,
        code: str | None = None,
        *,
        line: int | None = None,
        column: int | None = None,
    ):
        super().__init__(message, code)
        self.line = line
        self.column = column


class ConfigError(SchemaError):
    """Invalid run configuration (bad parallelism, no inputs, unknown format)."""

    code = "usage"
