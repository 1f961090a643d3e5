"""S-expression tokenizer and reader with source positions.

The surface syntax is parenthesized symbols. Comments run from ``;`` to
end of line. Every token and list remembers the 1-based line and column
where it started so later validation can point at the offending form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SexpSyntaxError


@dataclass(frozen=True)
class Symbol:
    text: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return self.text


@dataclass
class SList:
    items: list
    line: int = 0
    column: int = 0

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, i):
        return self.items[i]


@dataclass(frozen=True)
class _Token:
    kind: str  # "(", ")", or "symbol"
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, column = 1, 1
    current = ""
    start_line, start_column = 1, 1
    in_comment = False

    def flush() -> None:
        nonlocal current
        if current:
            tokens.append(_Token("symbol", current, start_line, start_column))
            current = ""

    for ch in text:
        if in_comment:
            if ch == "\n":
                in_comment = False
                line += 1
                column = 1
            continue
        if ch == ";":
            flush()
            in_comment = True
            column += 1
        elif ch == "(" or ch == ")":
            flush()
            tokens.append(_Token(ch, ch, line, column))
            column += 1
        elif ch == "\n":
            flush()
            line += 1
            column = 1
        elif ch.isspace():
            flush()
            column += 1
        else:
            if not current:
                start_line, start_column = line, column
            current += ch
            column += 1
    flush()
    return tokens


def read(text: str) -> list:
    """Parse source text into a list of top-level forms.

    Forms are nested ``SList`` values with ``Symbol`` leaves. Raises
    SexpSyntaxError on unbalanced parentheses.
    """
    tokens = tokenize(text)
    forms: list = []
    stack: list[SList] = []
    for tok in tokens:
        if tok.kind == "(":
            node = SList([], tok.line, tok.column)
            if stack:
                stack[-1].items.append(node)
            else:
                forms.append(node)
            stack.append(node)
        elif tok.kind == ")":
            if not stack:
                raise SexpSyntaxError("unmatched ')'", tok.line, tok.column)
            stack.pop()
        else:
            leaf = Symbol(tok.text, tok.line, tok.column)
            if stack:
                stack[-1].items.append(leaf)
            else:
                raise SexpSyntaxError(
                    "expected '(' to open a form", tok.line, tok.column
                )
    if stack:
        open_node = stack[-1]
        raise SexpSyntaxError("unclosed '('", open_node.line, open_node.column)
    return forms


def read_one(text: str, what: str = "form") -> SList:
    """Parse source text that must contain exactly one top-level form."""
    forms = read(text)
    if not forms:
        raise SexpSyntaxError(f"expected a {what}, got empty input", 1, 1)
    if len(forms) > 1:
        extra = forms[1]
        raise SexpSyntaxError(
            f"expected a single {what}", extra.line, extra.column
        )
    form = forms[0]
    if not isinstance(form, SList):
        raise SexpSyntaxError(f"expected a {what}", form.line, form.column)
    return form
