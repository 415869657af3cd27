"""Error hierarchy shared by the parser, the normalizer and the tools."""

from __future__ import annotations


class AsfError(Exception):
    """Base class. Every error carries a stable code and a German/English label."""

    code = "E-SPEC"
    term = "SPEZIFIKATIONSFEHLER"
    gloss = "specification error"
    kind = "SpecError"

    def __init__(self, message: str, *, pos=None, names=()):
        super().__init__(message)
        self.message = message
        self.pos = pos
        self.names = tuple(names)

    def located(self, pos) -> "AsfError":
        if self.pos is None and pos is not None:
            self.pos = pos
        return self

    def diagnostic(self) -> str:
        where = ""
        if self.pos is not None:
            file, line, col = self.pos
            where = f"{file or '<input>'}:{line}:{col}: "
        return f"{where}{self.code} {self.term}: {self.message} [{self.gloss}]"


class NormError(AsfError):
    pass


class SpecError(NormError):
    pass


class NameClash(NormError):
    code = "E-NAMECLASH"
    term = "NAMENSKONFLIKT"
    gloss = "name clash"
    kind = "NameClash"


class ExportabilityConflict(NormError):
    code = "E-EXPORT"
    term = "EXPORTIERBARKEITS-KONFLIKT"
    gloss = "exportability conflict"
    kind = "ExportabilityConflict"


class SemanticError(NormError):
    """Unmet parameter conditions. ``errors`` lists one entry per condition."""

    code = "E-SEM"
    term = "SEMANTIC ERROR"
    gloss = "parameter condition not proven"
    kind = "SemanticError"

    def __init__(self, message: str, *, pos=None, names=(), errors=None):
        super().__init__(message, pos=pos, names=names)
        self.errors = list(errors) if errors is not None else [self]

    def diagnostic(self) -> str:
        if len(self.errors) <= 1:
            return super().diagnostic()
        return "\n".join(e.located(self.pos).diagnostic() for e in self.errors)


class LexError(NormError):
    code = "E-SYNTAX"
    term = "SYNTAXFEHLER"
    gloss = "lexical error"
    kind = "LexOrParse"


class ParseError(NormError):
    code = "E-SYNTAX"
    term = "SYNTAXFEHLER"
    gloss = "syntax error"
    kind = "LexOrParse"

    def __init__(self, message: str, *, pos=None, names=(), expected=()):
        super().__init__(message, pos=pos, names=names)
        self.expected = tuple(expected)


class DuplicateModuleName(ParseError):
    pass


class DuplicateShortName(ParseError):
    pass


class DuplicateInstanceName(ParseError):
    pass


class ExpansionError(SpecError):
    gloss = "macro expansion error"


class DuplicateLabel(ExpansionError):
    pass


class FormatError(AsfError):
    code = "E-PROVEDB"
    term = "FORMATFEHLER"
    gloss = "malformed proof ledger"


class UnknownGoal(AsfError):
    code = "E-PROVEDB"
    term = "UNBEKANNTES BEWEISZIEL"
    gloss = "unknown goal"
