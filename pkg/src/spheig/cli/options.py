from pathlib import Path
from typing import Annotated, Literal

import typer

from spheig.models import Branch

DomainKindName = Literal["arc", "cap", "polygon"]
OutputFormat = Literal["json", "csv"]

POpt = Annotated[
    float,
    typer.Option("--p", help="Exponent p of the p-Laplacian (p > 1)."),
]

DimOpt = Annotated[
    int,
    typer.Option("--dim", "-N", help="Ambient dimension N (arcs: 2, polygons: 3)."),
]

DomainOpt = Annotated[
    DomainKindName,
    typer.Option("--domain", help="Domain kind: arc, cap or polygon."),
]

AlphaOpt = Annotated[
    float | None,
    typer.Option("--alpha", help="Arc length or cap geodesic radius in radians."),
]

VerticesFileOpt = Annotated[
    Path | None,
    typer.Option(
        "--vertices-file",
        help="TOML domain file (kind, alpha_radians or vertices, dim).",
    ),
]

BranchOpt = Annotated[
    Branch,
    typer.Option("--branch", help="singular (beta > 0) or regular (beta < 0)."),
]

TolOpt = Annotated[
    float,
    typer.Option("--tol", help="Root-finding tolerance on beta."),
]

StepsOpt = Annotated[
    str | None,
    typer.Option(
        "--steps",
        help="Comma separated approximation steps delta_k; defaults to 0.2/2^k, k=0..4.",
    ),
]

InnerRadiusOpt = Annotated[
    float,
    typer.Option("--a", help="Inner radius of the truncated cone."),
]

OuterRadiusOpt = Annotated[
    float,
    typer.Option("--b", help="Outer radius of the truncated cone."),
]

TauGridOpt = Annotated[
    str,
    typer.Option("--tau-grid", help="Comma separated tau values in [0, 1]."),
]

SeedOpt = Annotated[
    int,
    typer.Option("--seed", help="Seed of the randomized checks."),
]

OutOpt = Annotated[
    Path | None,
    typer.Option("--out", "-o", help="Write the result here instead of stdout."),
]

FormatOpt = Annotated[
    OutputFormat,
    typer.Option("--format", "-f", help="Output format."),
]

SvgOpt = Annotated[
    Path | None,
    typer.Option("--svg", help="Also write an SVG plot of beta against p."),
]
