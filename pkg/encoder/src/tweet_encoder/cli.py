import json
import sys

import click

from .encode import POOLING_MODES, EncoderError, EncoderSpec, SetupError, encode_corpus


@click.command()
@click.option("--model", "model_name", required=True, help="Model name or local path.")
@click.option("--in", "in_path", required=True, help="Cleaned corpus, one JSON object per line.")
@click.option("--out", "out_path", required=True, help="Output embedding file.")
@click.option(
    "--pooling",
    type=click.Choice(POOLING_MODES),
    default="cls_token",
    show_default=True,
)
@click.option("--max-length", default=128, show_default=True, help="Token truncation bound.")
@click.option("--batch", "batch_size", default=64, show_default=True)
def main(model_name, in_path, out_path, pooling, max_length, batch_size):
    """Encode tweets with a pre-trained transformer into the binary embedding format."""
    try:
        spec = EncoderSpec(
            model_name=model_name,
            max_length=max_length,
            batch_size=batch_size,
            pooling=pooling,
        )
        summary = encode_corpus(in_path, spec, out_path)
    except EncoderError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except SetupError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    click.echo(json.dumps(summary, sort_keys=True))


if __name__ == "__main__":
    main()
