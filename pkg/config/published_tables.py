"""Closed forms as printed in the source tables.

Each entry keeps the printed text, the variable it is written in ("r" = |z|, "y" = |z|^2),
and a callable evaluating the printed expression literally. Derived replacements live next
to the printed form when the two disagree; the table service decides which one the series
oracle supports.
"""
import math

PUBLISHED_NORMS = {
    1: {"printed": "exp(|z|)", "variable": "r", "value": lambda r: math.exp(r)},
    2: {"printed": "(1+|z|) exp(|z|)/2", "variable": "r", "value": lambda r: 0.5 * (1 + r) * math.exp(r)},
    3: {"printed": "(3|z|+2)/(2(1-|z|)^4)", "variable": "r",
        "value": lambda r: (3 * r + 2) / (2 * (1 - r) ** 4),
        "derived": "(1+2|z|)/(1-|z|)^4", "derived_value": lambda r: (1 + 2 * r) / (1 - r) ** 4},
    4: {"printed": "(|z|^2+4|z|+1)/(1-|z|)^4", "variable": "r",
        "value": lambda r: (r * r + 4 * r + 1) / (1 - r) ** 4},
    5: {"printed": "exp(|z|^2)", "variable": "y", "value": lambda y: math.exp(y)},
    6: {"printed": "(4|z|^4+8|z|^2+1) exp(|z|^2)", "variable": "y",
        "value": lambda y: (4 * y * y + 8 * y + 1) * math.exp(y)},
    7: {"printed": "(9|z|^4+14|z|^2+1)/(1-|z|^2)^4", "variable": "y",
        "value": lambda y: (9 * y * y + 14 * y + 1) / (1 - y) ** 4},
    8: {"printed": "(1+|z|^2)(|z|^4+22|z|^2+1)/(1-|z|^2)^4", "variable": "y",
        "value": lambda y: (1 + y) * (y * y + 22 * y + 1) / (1 - y) ** 4},
}

PUBLISHED_MEASURES = {
    1: "(|z|-1) exp(-|z|)/2",
    2: "exp(-|z|)",
    3: "theta(1-|z|)",
    4: "theta(1-|z|)/(2|z|)",
    5: "(4|z|^4-8|z|^2+1) exp(-|z|^2)",
    6: "exp(-|z|^2)",
    7: "theta(1-|z|)",
    8: "theta(1-|z|)/(2|z|)",
}

PUBLISHED_EXPECTATIONS = {
    1: {
        "J0": {"printed": "-|z|/2", "variable": "r", "value": lambda r: -r / 2},
        "J2": {"printed": "|z|(3+|z|)/4", "variable": "r", "value": lambda r: r * (3 + r) / 4},
    },
    2: {
        "J0": {"printed": "-|z|(|z|+2)/(2(|z|+1))", "variable": "r", "value": lambda r: -0.5 * r * (r + 2) / (r + 1)},
        "J2": {"printed": "|z|(|z|^2+6|z|+6)/(4(|z|+1))", "variable": "r",
               "value": lambda r: 0.25 * r * (r * r + 6 * r + 6) / (r + 1)},
    },
    3: {
        "J0": {"printed": "-|z|(9|z|+11)/(2(1-|z|)(3|z|+2))", "variable": "r",
               "value": lambda r: -0.5 * r * (9 * r + 11) / ((1 - r) * (3 * r + 2)),
               "derived": "-3|z|(1+|z|)/((1+2|z|)(1-|z|))",
               "derived_value": lambda r: -3 * r * (1 + r) / ((1 + 2 * r) * (1 - r))},
        "J2": {"printed": "|z|(9|z|^2+58|z|+33)/(4(1-|z|)^2(3|z|+2))", "variable": "r",
               "value": lambda r: 0.25 * r * (9 * r * r + 58 * r + 33) / ((1 - r) ** 2 * (3 * r + 2)),
               "derived": "3|z|(|z|^2+6|z|+3)/(2(1-|z|)^2(1+2|z|))",
               "derived_value": lambda r: 3 * r * (r * r + 6 * r + 3) / (2 * (1 - r) ** 2 * (1 + 2 * r))},
    },
    4: {
        "J0": {"printed": "-|z|(|z|^2+7|z|+4)/((1-|z|)(|z|^2+4|z|+1))", "variable": "r",
               "value": lambda r: -r * (r * r + 7 * r + 4) / ((1 - r) * (r * r + 4 * r + 1))},
        "J2": {"printed": "6|z|(|z|^2+3|z|+1)/((1-|z|)^2(|z|^2+4|z|+1))", "variable": "r",
               "value": lambda r: 6 * r * (r * r + 3 * r + 1) / ((1 - r) ** 2 * (r * r + 4 * r + 1))},
    },
    5: {
        "J0": {"printed": "-|z|^2", "variable": "y", "value": lambda y: -y},
        "J2": {"printed": "|z|^2(|z|^2+2)", "variable": "y", "value": lambda y: y * (y + 2)},
    },
    6: {
        "J0": {"printed": "-|z|^2(4|z|^4+16|z|^2+9)/(4|z|^4+8|z|^2+1)", "variable": "y",
               "value": lambda y: -y * (4 * y * y + 16 * y + 9) / (4 * y * y + 8 * y + 1)},
        # printed with a doubled "+" and |z| where |z|^2 is meant; value reads it literally
        "J2": {"printed": "|z|^2(|z|^2+2)(4|z|^4++24|z|+9)/(4|z|^4+8|z|^2+1)", "variable": "y",
               "value": lambda y: y * (y + 2) * (4 * y * y + 24 * math.sqrt(y) + 9) / (4 * y * y + 8 * y + 1),
               "derived": "|z|^2(|z|^2+2)(4|z|^4+24|z|^2+9)/(4|z|^4+8|z|^2+1)",
               "derived_value": lambda y: y * (y + 2) * (4 * y * y + 24 * y + 9) / (4 * y * y + 8 * y + 1)},
    },
    7: {
        "J0": {"printed": "-6|z|^2(3|z|^4+10|z|^2+3)/((1-|z|^2)(9|z|^4+14|z|^2+1))", "variable": "y",
               "value": lambda y: -6 * y * (3 * y * y + 10 * y + 3) / ((1 - y) * (9 * y * y + 14 * y + 1))},
        "J2": {"printed": "6|z|^2(3|z|^6+32|z|^4+39|z|^2+6)/((1-|z|^2)^2(9|z|^4+14|z|^2+1))", "variable": "y",
               "value": lambda y: 6 * y * (3 * y ** 3 + 32 * y * y + 39 * y + 6)
               / ((1 - y) ** 2 * (9 * y * y + 14 * y + 1))},
    },
    8: {
        "J0": {"printed": "-|z|^2(|z|^6+49|z|^4+115|z|^2+27)/((1-|z|^4)(|z|^4+22|z|^2+1))", "variable": "y",
               "value": lambda y: -y * (y ** 3 + 49 * y * y + 115 * y + 27) / ((1 - y * y) * (y * y + 22 * y + 1))},
        "J2": {"printed": "6|z|^2(9|z|^4+62|z|^2+9)/((1-|z|^2)^2(|z|^4+22|z|^2+1))", "variable": "y",
               "value": lambda y: 6 * y * (9 * y * y + 62 * y + 9) / ((1 - y) ** 2 * (y * y + 22 * y + 1))},
    },
}

# Tensor entries are functions of complex z; the S and V "--" entries carry a conj(z) power.
PUBLISHED_TENSORS = {
    4: {
        "S--": {"printed": "2 conj(z)^(1/2)(1+2|z|)/(|z|^2+4|z|+1)",
                "value": lambda z: 2 * (complex(z) ** 0.5).conjugate() * (1 + 2 * abs(z))
                / (abs(z) ** 2 + 4 * abs(z) + 1)},
        "V--": {"printed": "conj(z)(-|z|^2+4|z|+3)/(|z|^2+4|z|+1)",
                "value": lambda z: complex(z).conjugate() * (-abs(z) ** 2 + 4 * abs(z) + 3)
                / (abs(z) ** 2 + 4 * abs(z) + 1)},
        "V00": {"printed": "[|z|^2(-2|z|^3+|z|^2-6|z|+1) - 2(log(1-|z|)-|z|)]/(|z|^2(1-|z|)^4)",
                "value": lambda z: (abs(z) ** 2 * (-2 * abs(z) ** 3 + abs(z) ** 2 - 6 * abs(z) + 1)
                                    - 2 * (math.log(1 - abs(z)) - abs(z))) / (abs(z) ** 2 * (1 - abs(z)) ** 4)},
    },
    8: {
        "V--": {"printed": "conj(z)(-|z|^8+8|z|^6+110|z|^4+240|z|^2+27)/((1-|z|^4)(|z|^4+22|z|^2+1))",
                "value": lambda z: complex(z).conjugate()
                * (-abs(z) ** 8 + 8 * abs(z) ** 6 + 110 * abs(z) ** 4 + 240 * abs(z) ** 2 + 27)
                / ((1 - abs(z) ** 4) * (abs(z) ** 4 + 22 * abs(z) ** 2 + 1))},
        "V00": {"printed": "(-19|z|^8+5|z|^6-41|z|^4+7|z|^2-(1-|z|^2)^4 log(1-|z|^2))"
                           "/(|z|^2(1+|z|^2)(|z|^4+22|z|^2+1))",
                "value": lambda z: (-19 * abs(z) ** 8 + 5 * abs(z) ** 6 - 41 * abs(z) ** 4 + 7 * abs(z) ** 2
                                    - (1 - abs(z) ** 2) ** 4 * math.log(1 - abs(z) ** 2))
                / (abs(z) ** 2 * (1 + abs(z) ** 2) * (abs(z) ** 4 + 22 * abs(z) ** 2 + 1))},
    },
}

PUBLISHED_SEQUENCES = {
    1: {"c_j": "1/sqrt((2j)!)", "tower": "half-integer", "radius": "inf"},
    2: {"c_j": "sqrt((2j+1)/2)/sqrt((2j)!)", "tower": "half-integer", "radius": "inf"},
    3: {"c_j": "(2j+1) sqrt(j+1)", "tower": "half-integer", "radius": "1"},
    4: {"c_j": "(2j+1)^(3/2)", "tower": "half-integer", "radius": "1"},
    5: {"c_j": "1/sqrt(j!)", "tower": "integer", "radius": "inf"},
    6: {"c_j": "(2j+1)/sqrt(j!)", "tower": "integer", "radius": "inf"},
    7: {"c_j": "(2j+1) sqrt(j+1)", "tower": "integer", "radius": "1"},
    8: {"c_j": "(2j+1)^(3/2)", "tower": "integer", "radius": "1"},
}
