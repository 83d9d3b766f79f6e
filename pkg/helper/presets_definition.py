presets = [
    {
        "type": "preset",
        "preset": {
            "name": "exterior_exact_speed",
            "description": "Spreading outside a disk of radius 5 with d1 = d2 and a1 a2 <= 1, measured globally and at four anchors around the obstacle.",
            "criterion": "every w_upper and w_lower within 8% of the linear speed sqrt(2); w_lower <= w_upper; chain holds; estimates at eps and eps/2 agree; converged region grows monotonically.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "exterior_bounds",
            "description": "Spreading outside a disk for three parameter sets, one with d2 > 2 d1.",
            "criterion": "global w_upper <= 2 sqrt(r1) max(sqrt(d1), sqrt(d2/2)) + 8%; global w_lower >= linear speed - 8%.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "plane_upper",
            "description": "Spreading on the plane across a five-set parameter sweep.",
            "criterion": "w_upper <= 2 sqrt(d1 r1) + 8% for every set; w_upper <= linear speed + 8% when d1 = d2 and a1 a2 <= 1.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "comb_position_dependence",
            "description": "Plane minus a comb with teeth a_n = n^2; tubes below and above the spine.",
            "criterion": "below the spine: fitted speed within 10% of the linear speed; above: windowed slopes decline and the last is below half the linear speed.",
            "runtime": "tens of minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "spiral_zero",
            "description": "Central disk plus a tube around an Archimedean spiral.",
            "criterion": "windowed slopes of the leading edge decline and end below 0.3 times the linear speed; arrival time grows with radius at exponent >= 1.5.",
            "runtime": "tens of minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "cusp_superlinear",
            "description": "Truncated cusp exp(-e^s + s) against a uniform corridor of the entry width, plus diffusive equilibration times.",
            "criterion": "cusp windowed slopes increase; the cusp edge outruns the corridor edge; T(2L)/T(L) of the cusp is below that of the corridor.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "halfcyl_lower",
            "description": "Half-cylinder of radius 6 with eps = 0.5.",
            "criterion": "R0(eps) <= 6; the traveling-frame subsolution residual is nonnegative; w_upper >= linear speed - eps.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "quarter_space",
            "description": "Quarter plane x > 0, y > 0, anchor away from the second wall.",
            "criterion": "global and local w_upper within 8% of the linear speed.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "initial_value_independence",
            "description": "Two different compactly supported initial data outside the same disk.",
            "criterion": "global w_upper and w_lower differ by less than the combined confidence widths plus a 3% resolution floor.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "hypothesis_Hyz_transfer",
            "description": "Geodesic tube-slice test on the exterior and comb domains, with local speeds on the exterior.",
            "criterion": "exterior: hypothesis holds and the two anchors' speeds agree; comb: hypothesis is violated.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "kanon_sandwich",
            "description": "Minimal wave speed of 50 random monostable parameter sets.",
            "criterion": "every c* within [linear speed - tol, 2 sqrt(d1 r1) + tol], tol = 1e-3.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "linear_determinacy",
            "description": "Minimal wave speed of 20 random parameter sets satisfying the linear-determinacy condition.",
            "criterion": "|c* - linear speed| <= 2e-3 for every set.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "ode_pde_triangle",
            "description": "Front speed of the PDE on a line against the shooting speed, five parameter sets.",
            "criterion": "PDE speed within 3% of c*; both within 3% of the linear speed when linear determinacy holds.",
            "runtime": "minutes",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "supersolution_residuals",
            "description": "Residuals of the explicit comparison functions under the cooperative operators.",
            "criterion": "each construction nonnegative under its hypothesis; negative witnesses for ext_case1 with d2 > 2 d1 and for the traveling subsolution with R below R0.",
            "runtime": "seconds",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "eigenvalue_oracle",
            "description": "Discrete Dirichlet eigenvalues of disks against the Bessel value (j01/R)^2.",
            "criterion": "ball and Rayleigh eigenvalues within 1%; 1/R^2 scaling within 2%; R0(eps) and the Rayleigh radius within 5% of their closed forms.",
            "runtime": "seconds",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "scheme_monotonicity",
            "description": "Ten random cooperatively ordered initial pairs on the plane and outside a disk.",
            "criterion": "ordering violation <= 1e-10 at every snapshot.",
            "runtime": "seconds",
        },
    },
    {
        "type": "preset",
        "preset": {
            "name": "invariant_suite",
            "description": "Worker determinism, unit-box preservation, kinetic limit, Dulac sign, equilibria.",
            "criterion": "byte-identical probes for 1 and 4 workers; fields in [0,1]; ODE from (0.01, 0) within 1e-6 of (1,1) at t = 200; Dulac divergence negative on 20 random sets; exactly three corner equilibria.",
            "runtime": "seconds",
        },
    },
]
