"""Tokenizer for the concrete module syntax."""

from __future__ import annotations

import re
from typing import NamedTuple, Optional

from .errors import LexError

IDENT, FUNCSYM, KEYWORD, PUNCT, LABEL_BRACKET, ARROW, COMMA, COLON, HASH, UNDERSCORE, EOF = (
    "identifier", "function-symbol", "keyword", "punctuation", "label-bracket",
    "arrow", "comma", "colon", "hash", "underscore", "eof",
)

RESERVED = frozenset(
    {"if", "equation", "else", "case", "renamed", "bound", "sorts", "constructors",
     "non-constructors", "macro-equation"}
)
_HYPHENATED = {"non": "non-constructors", "macro": "macro-equation"}

_PLAIN_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789'_")
_SYMBOL_CHARS = set("!$%&+*;?~\\|/.")
NAME_CHARS = _PLAIN_CHARS | _SYMBOL_CHARS
_SINGLE = {"{": PUNCT, "}": PUNCT, "(": PUNCT, ")": PUNCT, "<": PUNCT, ">": PUNCT,
           "=": PUNCT, "@": PUNCT, "[": LABEL_BRACKET, "]": LABEL_BRACKET,
           ",": COMMA, ":": COLON, "#": HASH}
_INSTANCE_PREFIX = re.compile(r"\[[A-Za-z0-9'_]+(?:\s*,\s*[A-Za-z0-9'_]+)*\]-")


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int
    offset: int
    end: int

    @property
    def pos(self):
        return (self.line, self.col)


def is_user_name(text: str) -> bool:
    return bool(text) and all(c in NAME_CHARS for c in text) and text[0] != "_" and text[-1] != "_"


def lex(text: str, *, allow_hidden: bool = False, filename: Optional[str] = None) -> list:
    """Split ``text`` into tokens. ``allow_hidden`` accepts ``Prefix-name`` forms."""
    tokens: list = []
    i, n = 0, len(text)
    line, line_start = 1, 0

    def where(k):
        return (filename, line, k - line_start + 1)

    def add(kind, start, stop, value=None):
        tokens.append(Token(kind, text[start:stop] if value is None else value,
                            line, start - line_start + 1, start, stop))

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
            continue
        if c in " \t\r\f\v":
            i += 1
            continue
        if text.startswith("/*", i):
            close = text.find("*/", i + 2)
            if close < 0:
                raise LexError("unterminated comment", pos=where(i))
            for k in range(i, close):
                if text[k] == "\n":
                    line += 1
                    line_start = k + 1
            i = close + 2
            continue
        if text.startswith("-->", i):
            add(ARROW, i, i + 3)
            i += 3
            continue
        if text.startswith("->", i):
            add(ARROW, i, i + 2)
            i += 2
            continue
        if c in NAME_CHARS:
            i = _lex_name(text, i, tokens, line, line_start, allow_hidden, where)
            continue
        if c in _SINGLE:
            add(_SINGLE[c], i, i + 1)
            i += 1
            continue
        if c == "-":
            raise LexError("hyphen is not allowed in names", pos=where(i))
        raise LexError(f"illegal character {c!r}", pos=where(i))
    tokens.append(Token(EOF, "", line, i - line_start + 1, i, i))
    return tokens


def _name_run(text: str, i: int) -> int:
    n = len(text)
    while i < n and text[i] in NAME_CHARS:
        i += 1
    return i


def _lex_name(text, start, tokens, line, line_start, allow_hidden, where) -> int:
    stop = _name_run(text, start)
    word = text[start:stop]

    # two keywords contain a hyphen
    if word in _HYPHENATED and text.startswith(_HYPHENATED[word], start):
        full = _HYPHENATED[word]
        end = start + len(full)
        if end >= len(text) or text[end] not in NAME_CHARS:
            tokens.append(Token(KEYWORD, full, line, start - line_start + 1, start, end))
            return end

    if allow_hidden:
        stop = _extend_hidden(text, start, stop)
        word = text[start:stop]
    elif stop < len(text) and text[stop] == "-" and not text.startswith("->", stop) \
            and stop + 1 < len(text) and text[stop + 1] in NAME_CHARS:
        raise LexError(f"hyphen is not allowed in names ({word}-...)", pos=where(stop))

    # leading/trailing underscores are fixity markers, a trailing ';' separates lists
    lead = 0
    while lead < len(word) and word[lead] == "_":
        lead += 1
    trail_semi = word.endswith(";") and len(word) > lead + 1
    core_end = len(word) - (1 if trail_semi else 0)
    trail = 0
    while core_end - trail > lead and word[core_end - trail - 1] == "_":
        trail += 1

    def emit(kind, a, b):
        tokens.append(Token(kind, text[start + a:start + b], line,
                            start + a - line_start + 1, start + a, start + b))

    for k in range(lead):
        emit(UNDERSCORE, k, k + 1)
    core = word[lead:core_end - trail]
    if core:
        if core in RESERVED:
            kind = KEYWORD
        elif all(ch in _PLAIN_CHARS for ch in core.replace("-", "").replace("[", "").replace("]", "").replace(",", "")):
            kind = IDENT
        else:
            kind = FUNCSYM
        emit(kind, lead, core_end - trail)
    for k in range(core_end - trail, core_end):
        emit(UNDERSCORE, k, k + 1)
    if trail_semi:
        emit(PUNCT, core_end, core_end + 1)
    return stop


def _extend_hidden(text: str, start: int, stop: int) -> int:
    """Join ``Prefix-name`` and ``Prefix[i1,i2]-name`` into one token."""
    n = len(text)
    if stop < n and text[stop] == "[":
        m = _INSTANCE_PREFIX.match(text, stop)
        if m and m.end() < n and text[m.end()] in NAME_CHARS:
            return _name_run(text, m.end())
    if stop + 1 < n and text[stop] == "-" and text[stop + 1] in NAME_CHARS:
        return _name_run(text, stop + 1)
    return stop
