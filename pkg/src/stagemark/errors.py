"""Exception hierarchy. Every domain failure derives from StagemarkError."""


class StagemarkError(ValueError):
    pass


class ImageFormatError(StagemarkError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ParameterError(StagemarkError):
    pass


class DegenerateOrbitError(StagemarkError):
    pass


class CapacityError(StagemarkError):
    pass


class KeyFileError(StagemarkError):
    pass
