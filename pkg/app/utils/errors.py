from typing import Any, Dict, Optional


class QsrError(Exception):
    """Base error of the engine; `code` mirrors the error payload codes."""

    code = "QSR_ERROR"

    def __init__(self, message: str, location: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self):
        if self.location:
            return f"{self.location}: {self.message}"
        return self.message

    def to_dict(self) -> Dict[str, Any]:
        payload = {"code": self.code, "message": self.message}
        if self.location:
            payload["location"] = self.location
        return payload


class DegenerateInput(QsrError):
    code = "DEGENERATE_INPUT"


class DegenerateViewpoint(QsrError):
    code = "DEGENERATE_VIEWPOINT"


class MisalignedBox(QsrError):
    code = "MISALIGNED_BOX"


class NoIntersection(QsrError):
    code = "NO_INTERSECTION"


class SceneError(QsrError):
    code = "SCENE_ERROR"


class ParseError(SceneError):
    code = "PARSE_ERROR"


class ValidationError(SceneError):
    code = "VALIDATION_ERROR"


class UnitError(SceneError):
    code = "UNIT_ERROR"


class TripleIoError(QsrError):
    code = "IO_ERROR"
