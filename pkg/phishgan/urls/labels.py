"""Class labels of URLs."""

import enum


class UrlLabel(enum.IntEnum):
    BENIGN = 0
    MALICIOUS = 1

    @classmethod
    def parse(cls, token: str) -> "UrlLabel":
        """Read `benign`/`0` or `malicious`/`1`, case-insensitively.

        Raises:
            ValueError: For any other token.
        """
        normalized = str(token).strip().lower()
        if normalized in {"benign", "0"}:
            return cls.BENIGN
        if normalized in {"malicious", "1"}:
            return cls.MALICIOUS
        msg = f"unknown label {token!r}"
        raise ValueError(msg)

    @property
    def token(self) -> str:
        return self.name.lower()
