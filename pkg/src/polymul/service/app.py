"""HTTP front end wrapping the polynomial kernels.

All computation happens server-side; responses carry wall times measured
around the kernel call so clients (including the bundled CLI) report the
same numbers a local run would.  Input problems map to HTTP 400 with a
machine-readable kind: "parse" for anything malformed, "overflow" when an
exponent would not fit its bit field.
"""

from __future__ import annotations

import os
import time

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..core import ExponentOverflowError, Polynomial, default_layout
from ..cluster import ClusterError, cluster_run
from ..io import (
    ExprSyntaxError,
    PolyIOError,
    expr_var_names,
    eval_expr,
    format_poly,
    parse_expr,
    parse_poly,
)
from ..parmul import MulConfig, default_vars, mul, random_sparse, tune_l
from . import models


class ServiceInputError(ValueError):
    pass


BENCH_EXAMPLES = {
    1: ("(1+x+y+z+t)^{p}", "(1+x+y+z+t)^{p}+1"),
    2: ("(1+x+y+2*z^2+3*t^3+5*u^5)^{p}", "(1+u+t+2*z^2+3*y^3+5*x^5)^{p}"),
    3: ("(1+u^2+v+w^2+x-y^2)^{p}", "(1+u+v^2+w+x^2+y^3)^{p}+1"),
}

# Without the full flag, bench powers stay at desk scale (seconds, not hours).
BENCH_POWER_CAP = 12


def _resolve_pair(a_in: models.PolyInput, b_in: models.PolyInput,
                  var_names, coeff: str):
    """Build both operands on one shared variable table.

    Expression variables are inferred in order of first appearance across
    both inputs unless `var_names` pins them; file inputs declare their own
    variables, which must agree between the two operands.
    """
    ctype = float if coeff == "f64" else int
    file_vars = None
    for poly_in in (a_in, b_in):
        if poly_in.text is not None:
            declared = _declared_vars(poly_in.text)
            if file_vars is not None and declared != file_vars:
                raise ServiceInputError(
                    f"operand files declare different variables: "
                    f"{file_vars} vs {declared}")
            file_vars = declared
    if var_names is not None:
        names = tuple(var_names)
    elif file_vars is not None:
        names = file_vars
    else:
        names = []
        for poly_in in (a_in, b_in):
            for name in expr_var_names(poly_in.expr):
                if name not in names:
                    names.append(name)
        if not names:
            names = ["x"]  # constant expressions still need one variable slot
        names = tuple(names)
    layout = default_layout(names)

    def build(poly_in: models.PolyInput) -> Polynomial:
        if poly_in.text is not None:
            return parse_poly(poly_in.text, layout, ctype)
        return eval_expr(parse_expr(poly_in.expr, layout.vars), layout, ctype, mul)

    return build(a_in), build(b_in)


def _declared_vars(text: str):
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if fields[0] != "vars":
            break
        return tuple(fields[1:])
    raise PolyIOError("missing 'vars' header line")


def create_app() -> FastAPI:
    app = FastAPI(title="polymul", version=__version__)

    @app.exception_handler(ExponentOverflowError)
    async def _overflow(request: Request, exc: ExponentOverflowError):
        return JSONResponse(status_code=400,
                            content={"error": "overflow", "message": str(exc)})

    @app.exception_handler(ExprSyntaxError)
    @app.exception_handler(PolyIOError)
    @app.exception_handler(ServiceInputError)
    @app.exception_handler(ValueError)
    async def _parse(request: Request, exc: Exception):
        return JSONResponse(status_code=400,
                            content={"error": "parse", "message": str(exc)})

    @app.exception_handler(ClusterError)
    async def _cluster(request: Request, exc: ClusterError):
        return JSONResponse(status_code=500,
                            content={"error": "cluster", "message": str(exc)})

    @app.get("/health", response_model=models.HealthResponse)
    def health():
        return models.HealthResponse(status="ok", version=__version__,
                                     cpus=os.cpu_count() or 1)

    @app.post("/multiply", response_model=models.MultiplyResponse)
    def multiply(req: models.MultiplyRequest):
        a, b = _resolve_pair(req.a, req.b, req.vars, req.options.coeff)
        cfg = MulConfig(l=req.options.l, c=req.options.threads,
                        merger=req.options.merger)
        t0 = time.perf_counter()
        product = mul(a, b, cfg)
        elapsed = (time.perf_counter() - t0) * 1000.0
        return models.MultiplyResponse(
            a_terms=a.n, b_terms=b.n, result_terms=product.n, time_ms=elapsed,
            result=format_poly(product) if req.include_result else None)

    @app.post("/bench", response_model=models.BenchResponse)
    def bench(req: models.BenchRequest):
        if not req.full and req.power > BENCH_POWER_CAP:
            raise ServiceInputError(
                f"power {req.power} needs the full flag "
                f"(desk-scale cap is {BENCH_POWER_CAP})")
        f_src, g_src = BENCH_EXAMPLES[req.example]
        f_in = models.PolyInput(expr=f_src.format(p=req.power))
        g_in = models.PolyInput(expr=g_src.format(p=req.power))
        f, g = _resolve_pair(f_in, g_in, None, req.coeff)
        rows = []
        product = None
        for merger in req.mergers:
            for threads in req.threads:
                cfg = MulConfig(l=req.l, c=threads, merger=merger)
                for rep in range(req.repetitions):
                    t0 = time.perf_counter()
                    product = mul(f, g, cfg)
                    elapsed = (time.perf_counter() - t0) * 1000.0
                    rows.append(models.BenchRow(
                        merger=merger, threads=threads, repetition=rep,
                        time_ms=elapsed))
        verified = None
        if f.n * g.n <= req.verify_limit:
            from ..core import naive_mul
            verified = product == naive_mul(f, g)
        return models.BenchResponse(
            example=req.example, power=req.power, f_terms=f.n, g_terms=g.n,
            result_terms=product.n, rows=rows, verified=verified)

    @app.post("/tune", response_model=models.TuneResponse)
    def tune(req: models.TuneRequest):
        cfg = MulConfig(c=req.threads, merger=req.merger)
        report = tune_l(req.seed, req.sizes, req.l_values, cfg,
                        m_range=(req.m_min, req.m_max), max_deg=req.max_deg,
                        warmups=req.warmups)
        return models.TuneResponse(histogram=report.histogram,
                                   recommended_l=report.recommended_l,
                                   n_products=report.n_products)

    @app.post("/generate", response_model=models.GenerateResponse)
    def generate(req: models.GenerateRequest):
        if isinstance(req.vars, int):
            names = default_vars(req.vars)
        else:
            names = tuple(req.vars)
        layout = default_layout(names)
        ctype = float if req.coeff == "f64" else int
        poly = random_sparse(req.seed, len(names), req.terms, req.max_deg,
                             ctype=ctype, layout=layout)
        return models.GenerateResponse(text=format_poly(poly), terms=poly.n)

    @app.post("/cluster", response_model=models.ClusterResponse)
    def cluster(req: models.ClusterRequest):
        a, b = _resolve_pair(req.a, req.b, req.vars, req.options.coeff)
        cfg = MulConfig(l=req.options.l, c=req.options.threads,
                        merger=req.options.merger)
        t0 = time.perf_counter()
        run = cluster_run(a, b, cfg, req.nodes)
        elapsed = (time.perf_counter() - t0) * 1000.0
        return models.ClusterResponse(
            result_terms=run.poly.n, time_ms=elapsed,
            node_ops=list(run.node_ops), messages=run.stats.messages,
            bytes=run.stats.bytes,
            result=format_poly(run.poly) if req.include_result else None)

    return app
