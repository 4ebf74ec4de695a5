#!/usr/bin/env python3
"""Console output helpers: section banners, stderr progress and the --log tee."""
from datetime import datetime
import os
import sys


class TeeOutput:
    """Write to a stream and a log file"""
    def __init__(self, stream, file_handle):
        self.terminal = stream
        self.log = file_handle

    def write(self, message):
        self.terminal.write(message)
        self.log.write(message)

    def flush(self):
        self.terminal.flush()
        self.log.flush()


class OutputCapture:
    """Tee stdout and stderr into logs/<command>_<timestamp>.txt between start() and stop()."""

    def __init__(self, command, directory="logs"):
        self.command = command
        self.directory = directory
        self.filename = None
        self.output_file = None
        self.original_stdout = None
        self.original_stderr = None

    def start(self):
        os.makedirs(self.directory, exist_ok=True)
        timestamp = datetime.now().strftime("%Y_%m_%d_%H_%M_%S")
        self.filename = os.path.join(self.directory, f"{self.command}_{timestamp}.txt")
        self.output_file = open(self.filename, 'w', encoding='utf-8')
        self.original_stdout, self.original_stderr = sys.stdout, sys.stderr
        sys.stdout = TeeOutput(self.original_stdout, self.output_file)
        sys.stderr = TeeOutput(self.original_stderr, self.output_file)
        progress(f"Saving log to: {self.filename}")
        return self

    def stop(self):
        if self.output_file:
            sys.stdout.flush()
            sys.stdout, sys.stderr = self.original_stdout, self.original_stderr
            self.output_file.close()
            self.output_file = None
            progress(f"Log saved: {self.filename}")

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
        return False


def banner(title):
    progress(f"\n=== {title} ===")


def progress(message):
    print(message, file=sys.stderr, flush=True)
