"""CLAIMS v1 text format: prover responses on the wire."""
from __future__ import annotations

from .datamodel import FormatError, Itemset, format_itemset, parse_itemset
from .mining import ApproxStats, Mode
from .prover import ProverResponse, SideData

_MODE_TAGS = {m.value: m for m in Mode}


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_claims(resp: ProverResponse) -> str:
    header = f"#CLAIMS v1 mode={resp.mode.value} minsup={_fmt(resp.min_sup_ratio)}"
    if resp.pft is not None:
        header += f" pft={_fmt(resp.pft)}"
    header += f" delta={resp.delta}"
    lines = [header]
    for y in sorted(resp.claims, key=lambda x: (len(x), x)):
        claim = resp.claims[y]
        if isinstance(claim, ApproxStats):
            payload = (
                f"esup={_fmt(claim.esup)};var={_fmt(claim.variance)};"
                f"apcnt={_fmt(claim.approx_pcnt)}"
            )
        else:
            key = {
                Mode.DETERMINISTIC: "sup",
                Mode.EXPECTED: "esup",
                Mode.PWS: "pcnt",
            }[resp.mode]
            payload = f"{key}={_fmt(claim)}"
        lines.append(f"{format_itemset(y)}\t{payload}")
    for x in sorted(resp.side, key=lambda s: (len(s), s)):
        side = resp.side[x]
        xs = format_itemset(x)
        lines.append(f"!lambda X={xs} value={_fmt(side.lambda_)}")
        lines.append(f"!rho X={xs} value={_fmt(side.rho)}")
        for s in sorted(side.joint_tails, key=lambda t: (len(t), t)):
            lines.append(
                f"!joint X={xs} S={format_itemset(s)} value={_fmt(side.joint_tails[s])}"
            )
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> dict[str, str]:
    if not line.startswith("#CLAIMS v1"):
        raise FormatError("missing #CLAIMS v1 header")
    fields = {}
    for token in line[len("#CLAIMS v1"):].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise FormatError(f"malformed header field {token!r}")
        fields[key] = value
    return fields


def _parse_side_line(lineno: int, line: str) -> tuple[str, dict[str, str]]:
    kind, *tokens = line[1:].split()
    fields = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            raise FormatError(f"line {lineno}: malformed field {token!r}")
        fields[key] = value
    if kind not in ("lambda", "rho", "joint"):
        raise FormatError(f"line {lineno}: unknown side-data kind {kind!r}")
    return kind, fields


def parse_claims(text: str | bytes) -> ProverResponse:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = [l for l in text.splitlines()]
    stripped = [l for l in lines if l.strip()]
    if not stripped:
        raise FormatError("empty claims payload")
    header = _parse_header(stripped[0])
    try:
        mode = _MODE_TAGS[header["mode"]]
        minsup = float(header["minsup"])
        delta = int(header["delta"])
        pft = float(header["pft"]) if "pft" in header else None
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad header: {exc}") from exc

    claims: dict[Itemset, float | ApproxStats] = {}
    raw_side: dict[Itemset, dict] = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip()
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("!"):
            kind, fields = _parse_side_line(lineno, line)
            try:
                x = parse_itemset(fields["X"])
                value = float(fields["value"])
            except (KeyError, ValueError) as exc:
                raise FormatError(f"line {lineno}: {exc}") from exc
            entry = raw_side.setdefault(x, {"lambda": None, "rho": None, "joints": {}})
            if kind == "joint":
                try:
                    s = parse_itemset(fields["S"])
                except (KeyError, ValueError) as exc:
                    raise FormatError(f"line {lineno}: {exc}") from exc
                entry["joints"][s] = value
            else:
                entry[kind] = value
            continue
        head, sep, payload = line.partition("\t")
        if not sep:
            raise FormatError(f"line {lineno}: missing tab separator")
        try:
            y = parse_itemset(head)
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        values = {}
        for token in payload.split(";"):
            key, sep, num = token.partition("=")
            if not sep:
                raise FormatError(f"line {lineno}: malformed pair {token!r}")
            try:
                values[key] = float(num)
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}") from exc
        if mode is Mode.APPROX:
            try:
                claims[y] = ApproxStats(values["esup"], values["var"], values["apcnt"])
            except KeyError as exc:
                raise FormatError(f"line {lineno}: missing approx key {exc}") from exc
        else:
            key = {Mode.DETERMINISTIC: "sup", Mode.EXPECTED: "esup", Mode.PWS: "pcnt"}[mode]
            if key not in values:
                raise FormatError(f"line {lineno}: missing key {key!r}")
            claims[y] = values[key]

    side = {}
    for x, entry in raw_side.items():
        if entry["lambda"] is None:
            raise FormatError(f"side data for {format_itemset(x)} missing lambda")
        side[x] = SideData(
            lambda_=entry["lambda"],
            rho=entry["rho"] if entry["rho"] is not None else 0.0,
            joint_tails=entry["joints"],
        )
    return ProverResponse(
        mode=mode,
        min_sup_ratio=minsup,
        pft=pft,
        delta=delta,
        claims=claims,
        side=side,
    )
