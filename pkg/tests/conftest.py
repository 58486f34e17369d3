from mprpvs.instance import Instance, Site


def make_instance(specs, depot=(0.0, 0.0), m=1, Q=100, T=8, alpha=10.0, constant=False):
    """Build an instance from ``(x, y, rho, e, l)`` tuples with ids 1..n."""
    sites = tuple(Site(i, x, y, rho, e, l) for i, (x, y, rho, e, l) in enumerate(specs, start=1))
    return Instance(sites, depot, m, Q, T, alpha, constant)
