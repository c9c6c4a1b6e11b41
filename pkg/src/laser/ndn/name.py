from __future__ import annotations

from typing import Iterable, Iterator, Union
from urllib.parse import quote, unquote_to_bytes

from . import tlv

Component = Union[bytes, str, int]

_SAFE = "-._~!$&'()*+,;=:@"


def _component(c: Component) -> bytes:
    if isinstance(c, bytes):
        return c
    if isinstance(c, str):
        return c.encode()
    if isinstance(c, int):
        return str(c).encode()
    raise TypeError(f"cannot use {type(c).__name__} as a name component")


class Name:
    """Immutable hierarchical name: an ordered tuple of octet strings."""

    __slots__ = ("components", "_hash", "_wire")

    def __init__(self, components: Iterable[Component] = ()):
        self.components: tuple[bytes, ...] = tuple(_component(c) for c in components)
        self._hash = hash(self.components)
        self._wire: bytes | None = None

    @classmethod
    def _of(cls, components: tuple[bytes, ...]) -> Name:
        # components already validated as bytes
        name = cls.__new__(cls)
        name.components = components
        name._hash = hash(components)
        name._wire = None
        return name

    @classmethod
    def from_str(cls, uri: str) -> Name:
        parts = [p for p in uri.strip().split("/") if p]
        return cls(unquote_to_bytes(p) for p in parts)

    def __str__(self):
        if not self.components:
            return "/"
        return "".join("/" + quote(c, safe=_SAFE) for c in self.components)

    def __repr__(self):
        return f"Name({str(self)!r})"

    def __len__(self):
        return len(self.components)

    def __iter__(self) -> Iterator[bytes]:
        return iter(self.components)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return Name._of(self.components[item])
        return self.components[item]

    def __eq__(self, other):
        return isinstance(other, Name) and self.components == other.components

    def __lt__(self, other: Name):
        return self.components < other.components

    def __hash__(self):
        return self._hash

    def __add__(self, other) -> Name:
        if isinstance(other, Name):
            return Name._of(self.components + other.components)
        return Name(self.components + tuple(_component(c) for c in other))

    def append(self, *components: Component) -> Name:
        return Name(self.components + tuple(_component(c) for c in components))

    def text(self, i: int) -> str:
        return self.components[i].decode()

    def is_prefix_of(self, other: Name) -> bool:
        n = len(self.components)
        return n <= len(other.components) and other.components[:n] == self.components

    def prefixes(self) -> Iterator[Name]:
        """All prefixes from the full name down to the root."""
        for n in range(len(self.components), -1, -1):
            yield Name._of(self.components[:n])

    def encode(self) -> bytes:
        if self._wire is None:
            body = b"".join(tlv.encode_tlv(tlv.NAME_COMPONENT, c) for c in self.components)
            self._wire = tlv.encode_tlv(tlv.NAME, body)
        return self._wire

    @classmethod
    def decode_value(cls, value: bytes) -> Name:
        comps = []
        offset, end = 0, len(value)
        while offset < end:
            tlv_type, comp, offset = tlv.decode_tlv(value, offset)
            if tlv_type != tlv.NAME_COMPONENT:
                raise tlv.TlvError(f"unexpected TLV {tlv_type:#x} inside Name")
            comps.append(comp)
        name = cls._of(tuple(comps))
        name._wire = tlv.encode_tlv(tlv.NAME, value)
        return name

    @classmethod
    def decode(cls, buf: bytes) -> Name:
        tlv_type, value, end = tlv.decode_tlv(buf)
        if tlv_type != tlv.NAME or end != len(buf):
            raise tlv.TlvError("not a Name TLV")
        return cls.decode_value(value)
