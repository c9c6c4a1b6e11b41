"""Fixed 50 m square, 40 to 100 standard nodes."""

from _sweep import sweep_family

if __name__ == "__main__":
    sweep_family(["density40", "density60", "density80", "density100"], __doc__)
