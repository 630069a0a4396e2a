"""Console entry point: run the API service under uvicorn."""

from __future__ import annotations

import click
import uvicorn

from ..config import load_config
from .app import create_app


@click.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None, help="Path to the JSON config file.")
@click.option("--host", default=None, help="Override the listen host.")
@click.option("--port", type=int, default=None, help="Override the listen port.")
def main(config_path: str | None, host: str | None, port: int | None) -> None:
    """Start the freecycling platform API server."""
    config = load_config(config_path)
    if host:
        config.listen_host = host
    if port:
        config.listen_port = port
    app = create_app(config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="info")


if __name__ == "__main__":
    main()
