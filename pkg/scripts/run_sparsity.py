"""100 standard nodes, square side from 50 m to 400 m."""

from _sweep import sweep_family

if __name__ == "__main__":
    sweep_family(["area50", "area100", "area200", "area400"], __doc__)
