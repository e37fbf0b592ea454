import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

import pandas as pd

_logger = logging.getLogger(__name__)

OUTPUT_ENV_VAR = "METRIC_GAMES_OUTPUT"


class ConfigError(ValueError):
    pass


def parse_rational(text):
    """Parse exact "p/q" (or integer "p") text into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    text = str(text).strip()
    if not text or "." in text or "e" in text.lower():
        raise ConfigError(f"Expected an exact rational p/q, got {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ConfigError(f"Zero denominator in rational {text!r}")
    except ValueError:
        raise ConfigError(f"Cannot parse rational {text!r}")


def format_rational(value):
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def output_dir(cli_value=None):
    if cli_value:
        out_dir = Path(cli_value)
    else:
        out_dir = Path(os.environ.get(OUTPUT_ENV_VAR, "output"))
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def write_text_atomic(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_name(path.name + ".tmp")
    with open(tmp_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    os.replace(tmp_path, path)
    _logger.debug(f"Wrote {path}")


def dump_jsonl(records):
    return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in records)


def write_jsonl(path, records):
    write_text_atomic(path, dump_jsonl(records))


def read_jsonl(path):
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            yield json.loads(line)


def write_csv(rows, columns, path=None):
    """Write dict rows as CSV; to stdout when no path is given."""
    df = pd.DataFrame(list(rows), columns=columns)
    text = df.to_csv(index=False, lineterminator="\n")
    if path is None:
        sys.stdout.write(text)
    else:
        write_text_atomic(path, text)
    return df
