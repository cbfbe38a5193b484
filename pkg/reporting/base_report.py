import hashlib
import json
from abc import ABC, abstractmethod
from datetime import datetime

SCHEMA = "peps-mqc/1"


def content_hash(payload) -> str:
    """Git-style blob hash of the canonical JSON form of ``payload``."""
    body = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=_jsonable).encode()
    return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()


class Report(ABC):
    """
    A JSON document: a header shared by every command (schema, timestamp, config echo, hashes of the inputs and of the
    result) followed by whatever ``get_data`` returns. A top-level ``passed`` key in the data decides the exit code.
    """

    report_type = ""

    def __init__(self, config: dict = None):
        self.config = dict(config or {})
        self.filename = None
        self.inputs = {}
        self.data = None

    @abstractmethod
    def get_data(self) -> dict:
        raise NotImplementedError

    @property
    def passed(self) -> bool:
        if self.data is None:
            self.data = self.get_data()
        return bool(self.data.get("passed", True))

    def header(self) -> dict:
        if self.data is None:
            self.data = self.get_data()
        return {
            "schema": SCHEMA,
            "report": self.report_type,
            "generated": datetime.now().isoformat(timespec="seconds"),
            "config": self.config,
            "input_hash": content_hash(self.inputs),
            # neither hash covers the timestamp
            "output_hash": content_hash(self.data),
        }

    def generate_report_data(self):
        if self.data is None:
            self.data = self.get_data()
        document = {**self.header(), **self.data}
        yield from json.JSONEncoder(indent=2, default=_jsonable).iterencode(document)
        yield "\n"

    def return_data(self, path: str = None) -> str:
        text = "".join(self.generate_report_data())
        if path:
            with open(path, "w") as handle:
                handle.write(text)
        return text


def _jsonable(value):
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"{type(value).__name__} is not JSON serializable")
