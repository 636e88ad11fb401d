"""
Command line entry point: ``holder analyze|normalize|diagram|slice|verify``.

Exit codes: 0 when every verdict passes, 2 for a failed verdict or stage,
1 for usage, parse and configuration errors.
"""
import sys
from functools import wraps
from typing import Dict, Optional

import click

from analysis_system import AnalysisSystem
from holderbound import __version__
from holderbound.config import load_config
from holderbound.corpus import names
from holderbound.errors import HolderBoundError
from holderbound.report import dumps
from holderbound.witness_grid import load_witness_grid
from models import DomainSpec

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_FAILED = 2

FILE = click.Path(exists=True, dir_okay=False)


def analysis_options(command):
    """Input, sweep and output flags shared by every subcommand"""
    options = [
        click.option('--domain', 'domain_file', type=FILE, help='File with the defining function R(z).'),
        click.option('--curve', 'curve_file', type=FILE, help='File with the curve components in t.'),
        click.option('--eta', type=int, help='Contact order of the curve.'),
        click.option('--corpus', type=click.Choice(names()), help='Use a named corpus domain instead of files.'),
        click.option('--deltas', help="Delta sweep, geometric 'start:stop:count' or a comma list."),
        click.option('--samples', type=int, help='Sample count for sup estimates.'),
        click.option('--seed', type=int, help='Sampler seed.'),
        click.option('--config', 'config_file', type=FILE, help='key = value configuration file.'),
        click.option('--out', type=click.Path(dir_okay=False, writable=True), help='Write the JSON report here.'),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def build_spec(domain_file: Optional[str], curve_file: Optional[str], eta: Optional[int], corpus: Optional[str],
               config_file: Optional[str], overrides: Dict) -> DomainSpec:
    config = load_config(config_file, overrides)
    if corpus:
        if domain_file or curve_file:
            raise click.UsageError('--corpus cannot be combined with --domain or --curve')
        spec = DomainSpec.from_corpus(corpus, config)
        return DomainSpec.create(spec.domain_text, spec.curve_text, eta, config, spec.name) if eta else spec
    missing = [flag for flag, value in (('--domain', domain_file), ('--curve', curve_file), ('--eta', eta))
               if value is None]
    if missing:
        raise click.UsageError(f"Missing {', '.join(missing)} (or use --corpus)")
    with open(domain_file, 'r', encoding='utf-8') as f:
        domain_text = f.read()
    with open(curve_file, 'r', encoding='utf-8') as f:
        curve_text = f.read()
    return DomainSpec.create(domain_text, curve_text, eta, config)


def emit(report: Dict, out: Optional[str]) -> int:
    body = dumps(report)
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(body)
    else:
        click.echo(body, nl=False)
    verdict = report.get('verdict') or {}
    summary = f"{report['id']}: {report['status']}"
    if report.get('failed_stage'):
        summary += f" at {report['failed_stage']} ({report['error']['message']})"
    if verdict.get('conclusion'):
        summary += f", {verdict['conclusion']}"
    click.echo(summary, err=True)
    return EXIT_PASS if report['passed'] else EXIT_FAILED


def stage_command(until: str):
    """Turn a subcommand body into a run of the pipeline up to `until`"""
    def decorator(func):
        @analysis_options
        @wraps(func)
        def command(domain_file, curve_file, eta, corpus, deltas, samples, seed, config_file, out, **extra):
            spec = build_spec(domain_file, curve_file, eta, corpus, config_file,
                              {'deltas': deltas, 'samples': samples, 'seed': seed})
            witness = func(**extra)
            report = AnalysisSystem().run_analysis(spec, until=until, witness=witness)
            return emit(report, out)
        return command
    return decorator


@click.group()
@click.version_option(__version__, prog_name='holder')
def cli():
    """Hoelder-regularity obstructions for model domains in C^3."""


@cli.command()
@stage_command('holder_pipeline')
def analyze():
    """Run every stage and conclude the bound epsilon <= 1/eta."""


@cli.command()
@stage_command('normal_form')
def normalize():
    """Special coordinates and their certificate."""


@cli.command()
@stage_command('newton_diagram')
def diagram():
    """Newton diagram, truncations and plurisubharmonicity checks."""


@cli.command(name='slice')
@stage_command('slice_analysis')
def slice_():
    """Slice normalizations and derivative scaling fits over the delta sweep."""


@cli.command()
@click.option('--witness-grid', type=FILE, help='Tabulated witness to validate at its own delta.')
@stage_command('domain_geometry')
def verify(witness_grid=None):
    """Containment and domination checks, plus an optional tabulated witness."""
    return load_witness_grid(witness_grid) if witness_grid else None


def main(argv=None) -> int:
    try:
        result = cli.main(args=argv, prog_name='holder', standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo('Aborted!', err=True)
        return EXIT_USAGE
    except HolderBoundError as e:
        click.echo(f"Error: {str(e)}", err=True)
        return EXIT_USAGE
    return result if isinstance(result, int) else EXIT_PASS


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()
