"""Lexical normalization of raw source into atom sequences.

Two lexers are provided:

* ``normalize_indented`` for the indentation-sensitive language:
  comments and docstrings are removed, logical line breaks become
  NEW_LINE atoms and indentation changes become INDENT / DEDENT atoms.
* ``normalize_braced`` for the brace-delimited language: line and block
  comments are removed and all layout is collapsed; no special atoms.

Both keep string literals, atomizing their contents like any other text
(the quotes become punctuation atoms).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .atoms import (
    DEDENT,
    INDENT,
    LANG_BRACED,
    LANG_INDENTED,
    NEW_LINE,
    PUNCT,
    SPECIAL,
    Atom,
    NormalizedSeq,
    atomize,
)
from .errors import InconsistentIndentation, UnterminatedComment, UnterminatedString

_OPENERS = "([{"
_CLOSERS = ")]}"

# Lexical item kinds inside one logical line.
_STR = "str"
_TEXT = "text"

# Characters that end a plain text run inside a logical line.
_RUN_BREAKERS = "'\"#\n\\ \t\r\f"


@dataclass
class _LogicalLine:
    indent: int
    line_no: int
    items: list[tuple[str, str]] = field(default_factory=list)

    def is_string_statement(self) -> bool:
        return bool(self.items) and all(kind == _STR for kind, _ in self.items)


def _indent_width(prefix: str) -> int:
    # Tabs count as width 8, spaces as 1.
    return sum(8 if c == "\t" else (0 if c == "\f" else 1) for c in prefix)


def _scan_indented(source: str, path) -> list[_LogicalLine]:
    """Split source into logical lines of string/text items.

    Comments are dropped here; strings are kept as single items so the
    docstring pass can recognize string-only statements.  Newlines inside
    bracket pairs join physical lines, as does a trailing backslash.
    """
    lines: list[_LogicalLine] = []
    i = 0
    n = len(source)
    line_no = 1
    depth = 0
    current: _LogicalLine | None = None

    while i < n:
        if depth == 0 and current is None:
            # At the start of a potential logical line: measure indent.
            start = i
            while i < n and source[i] in " \t\f":
                i += 1
            if i >= n:
                break
            if source[i] == "\r":
                i += 1
                continue
            if source[i] == "\n":
                i += 1
                line_no += 1
                continue
            if source[i] == "#":
                while i < n and source[i] != "\n":
                    i += 1
                continue
            current = _LogicalLine(_indent_width(source[start:i]), line_no)
            continue

        ch = source[i]
        if ch == "\n":
            line_no += 1
            i += 1
            if depth == 0:
                lines.append(current)
                current = None
            continue
        if ch in " \t\r\f":
            i += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "\\" and i + 1 < n and source[i + 1] == "\n":
            i += 2
            line_no += 1
            continue
        if ch in "'\"":
            text, i, line_no = _scan_py_string(source, i, line_no, path)
            current.items.append((_STR, text))
            continue

        start = i
        while i < n and source[i] not in _RUN_BREAKERS:
            c = source[i]
            if c in _OPENERS:
                depth += 1
            elif c in _CLOSERS:
                depth = max(0, depth - 1)
            i += 1
        if i == start:  # lone backslash with no newline to join
            i += 1
        current.items.append((_TEXT, source[start:i]))

    if current is not None:
        lines.append(current)
    return lines


def _scan_py_string(source: str, i: int, line_no: int, path) -> tuple[str, int, int]:
    """Consume a quoted literal starting at source[i]; returns (text, end, line)."""
    n = len(source)
    quote = source[i]
    start_line = line_no
    if source.startswith(quote * 3, i):
        delim = quote * 3
        j = i + 3
        while j < n:
            if source[j] == "\\":
                j += 2
                continue
            if source.startswith(delim, j):
                end = j + 3
                return source[i:end], end, line_no + source.count("\n", i, end)
            j += 1
        raise UnterminatedString("unterminated triple-quoted string",
                                 path=path, line=start_line)
    j = i + 1
    while j < n:
        c = source[j]
        if c == "\\":
            if j + 1 < n and source[j + 1] == "\n":
                line_no += 1
            j += 2
            continue
        if c == "\n":
            raise UnterminatedString("newline in string literal",
                                     path=path, line=start_line)
        if c == quote:
            return source[i:j + 1], j + 1, line_no
        j += 1
    raise UnterminatedString("unterminated string literal", path=path, line=start_line)


def _drop_docstrings(lines: list[_LogicalLine]) -> list[_LogicalLine]:
    """Remove string-only statements opening a module, class or def body."""
    out: list[_LogicalLine] = []
    # Indent of a just-seen def/class header, -1 at module start,
    # None when the next statement cannot be a docstring.
    expect_at: int | None = -1
    for ln in lines:
        if expect_at is not None and ln.is_string_statement() and (
                expect_at == -1 or ln.indent > expect_at):
            expect_at = None
            continue
        expect_at = None
        texts = [t for k, t in ln.items if k == _TEXT]
        if texts[:1] in (["def"], ["class"]) or texts[:2] == ["async", "def"]:
            expect_at = ln.indent
        out.append(ln)
    return out


def _string_atoms(literal: str) -> list[Atom]:
    """Atoms of a quoted literal: quote punctuation plus atomized contents."""
    q = 3 if literal.startswith(("'''", '"""')) else 1
    atoms = [Atom(c, PUNCT) for c in literal[:q]]
    atoms.extend(atomize(literal[q:len(literal) - q]))
    atoms.extend(Atom(c, PUNCT) for c in literal[len(literal) - q:])
    return atoms


def normalize_indented(source: str, path=None) -> NormalizedSeq:
    """Normalize indentation-sensitive source (comments/docstrings removed)."""
    lines = _drop_docstrings(_scan_indented(source, path))
    atoms: list[Atom] = []
    stack = [0]
    for ln in lines:
        if ln.indent > stack[-1]:
            stack.append(ln.indent)
            atoms.append(Atom(INDENT, SPECIAL))
        else:
            while ln.indent < stack[-1]:
                stack.pop()
                atoms.append(Atom(DEDENT, SPECIAL))
            if ln.indent != stack[-1]:
                raise InconsistentIndentation(
                    f"dedent to unknown indentation level {ln.indent}",
                    path=path, line=ln.line_no)
        for kind, text in ln.items:
            if kind == _STR:
                atoms.extend(_string_atoms(text))
            else:
                atoms.extend(atomize(text))
        atoms.append(Atom(NEW_LINE, SPECIAL))
    return NormalizedSeq(tuple(atoms), LANG_INDENTED)


def normalize_braced(source: str, path=None) -> NormalizedSeq:
    """Normalize brace-delimited source: comments out, layout collapsed."""
    atoms: list[Atom] = []
    i = 0
    n = len(source)
    line_no = 1
    while i < n:
        ch = source[i]
        if ch == "\n":
            line_no += 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            end = source.find("*/", i + 2)
            if end < 0:
                raise UnterminatedComment("unterminated block comment",
                                          path=path, line=line_no)
            line_no += source.count("\n", i, end)
            i = end + 2
            continue
        if ch in "'\"":
            start_line = line_no
            j = i + 1
            while j < n:
                c = source[j]
                if c == "\\":
                    if j + 1 < n and source[j + 1] == "\n":
                        line_no += 1
                    j += 2
                    continue
                if c == "\n":
                    raise UnterminatedString("newline in string literal",
                                             path=path, line=start_line)
                if c == ch:
                    break
                j += 1
            else:
                raise UnterminatedString("unterminated string literal",
                                         path=path, line=start_line)
            atoms.append(Atom(ch, PUNCT))
            atoms.extend(atomize(source[i + 1:j]))
            atoms.append(Atom(ch, PUNCT))
            i = j + 1
            continue
        start = i
        while i < n and not source[i].isspace() and source[i] not in "'\"/":
            i += 1
        if i == start:  # a bare '/'
            i += 1
        atoms.extend(atomize(source[start:i]))
    return NormalizedSeq(tuple(atoms), LANG_BRACED)
