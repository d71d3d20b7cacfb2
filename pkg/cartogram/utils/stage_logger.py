import time

from django.conf import settings
from django.utils import timezone
from django.utils.termcolors import colorize


class StageLogger:
    """
    Times the named stages of one pipeline run and prints a report in DEBUG mode.

    The report prints once, also when a stage raises.

        with StageLogger('grid3x3.json') as stages:
            with stages.stage('skeleton'):
                ...
    """

    def __init__(self, label, stream=None):
        self.label = label
        self.stream = stream
        self.stages = []
        self._started = None
        self._done = False

    def __enter__(self):
        self._started = time.monotonic()
        self._done = False
        return self

    def __exit__(self, exc_type, exc, tb):
        self.report(failed=exc_type is not None)
        return False

    def stage(self, name):
        return _Stage(self, name)

    @property
    def total_ms(self):
        if self._started is None:
            return 0.0
        return (time.monotonic() - self._started) * 1000

    def _print(self, line):
        if self.stream is not None:
            self.stream.write(line + "\n")
        else:
            print(line)

    def report(self, failed=False):
        if not settings.DEBUG or self._done:
            return
        self._done = True

        just_total = getattr(settings, "STAGE_LOGGER_JUST_TOTAL", False)

        def cyan(s): return colorize(s, fg="cyan")
        def yellow(s): return colorize(s, fg="yellow")
        def green(s): return colorize(s, fg="green")
        def magenta(s): return colorize(s, fg="magenta")
        def red(s): return colorize(s, fg="red")

        self._print("\n" + "=" * 100)
        self._print(green(f"Stage Report for {self.label} at {timezone.now().strftime('%H:%M:%S')}"))
        self._print(yellow(f"Stages: {len(self.stages)} | Total Time: {self.total_ms:.2f} ms"))
        self._print("-" * 100)

        if not just_total:
            for idx, (name, elapsed) in enumerate(self.stages, start=1):
                self._print(f"{cyan(f'[{idx}]')} {magenta(f'{elapsed:.2f} ms')} → {name}")
        else:
            self._print(cyan("Skipping stage details (STAGE_LOGGER_JUST_TOTAL=True)"))

        if failed:
            self._print(red("Run stopped with an error."))

        self._print("=" * 100 + "\n")


class _Stage:

    def __init__(self, logger, name):
        self.logger = logger
        self.name = name
        self.started = None

    def __enter__(self):
        self.started = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.logger.stages.append((self.name, (time.monotonic() - self.started) * 1000))
        return False
