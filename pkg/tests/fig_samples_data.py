"""Digitized capacity-vs-SINR curve samples (dB, Mbps).

Independent reference for the shipped ladder fidelity checks."""

MEASURED_CURVE_SAMPLES = [
    (-20, 0),
    (-19.6984924623116, 0),
    (-19.3969849246231, 0),
    (-19.0954773869347, 0),
    (-18.7939698492462, 0),
    (-18.4924623115578, 0),
    (-18.1909547738693, 0),
    (-17.8894472361809, 0),
    (-17.5879396984925, 0),
    (-17.286432160804, 0),
    (-16.9849246231156, 0),
    (-16.6834170854271, 0),
    (-16.3819095477387, 0),
    (-16.0804020100502, 0),
    (-15.7788944723618, 0),
    (-15.4773869346734, 0),
    (-15.1758793969849, 0),
    (-14.8743718592965, 0),
    (-14.572864321608, 0),
    (-14.2713567839196, 0),
    (-13.9698492462312, 0),
    (-13.6683417085427, 0),
    (-13.3668341708543, 0),
    (-13.0653266331658, 0),
    (-12.7638190954774, 0),
    (-12.4623115577889, 0),
    (-12.1608040201005, 0),
    (-11.8592964824121, 0),
    (-11.5577889447236, 0),
    (-11.2562814070352, 0),
    (-10.9547738693467, 0),
    (-10.6532663316583, 0),
    (-10.3517587939699, 0),
    (-10.0502512562814, 0),
    (-9.74874371859297, 0),
    (-9.44723618090452, 0),
    (-9.14572864321608, 0),
    (-8.84422110552764, 0),
    (-8.5427135678392, 0),
    (-8.24120603015075, 0),
    (-7.93969849246231, 0),
    (-7.63819095477387, 0),
    (-7.33668341708543, 0),
    (-7.03517587939699, 0),
    (-6.73366834170854, 0),
    (-6.4321608040201, 0),
    (-6.13065326633166, 0),
    (-5.82914572864322, 0),
    (-5.52763819095478, 0),
    (-5.22613065326633, 0),
    (-4.92462311557789, 51.76899),
    (-4.62311557788945, 51.76899),
    (-4.32160804020101, 108.28347075),
    (-4.02010050251256, 108.28347075),
    (-3.71859296482412, 108.28347075),
    (-3.41708542713568, 108.28347075),
    (-3.11557788944724, 108.28347075),
    (-2.81407035175879, 108.28347075),
    (-2.51256281407035, 108.28347075),
    (-2.21105527638191, 108.28347075),
    (-1.90954773869347, 108.28347075),
    (-1.60804020100502, 108.28347075),
    (-1.30653266331658, 108.28347075),
    (-1.00502512562814, 108.28347075),
    (-0.7035175879397, 108.28347075),
    (-0.402010050251256, 108.28347075),
    (-0.100502512562816, 108.28347075),
    (0.201005025125625, 132.873741),
    (0.502512562814069, 132.873741),
    (0.804020100502512, 132.873741),
    (1.10552763819095, 132.873741),
    (1.40703517587939, 163.50372675),
    (1.70854271356784, 163.50372675),
    (2.01005025125628, 163.50372675),
    (2.31155778894472, 163.50372675),
    (2.61306532663316, 163.50372675),
    (2.91457286432161, 163.50372675),
    (3.21608040201005, 193.70230425),
    (3.51758793969849, 193.70230425),
    (3.81909547738693, 193.70230425),
    (4.12060301507537, 193.70230425),
    (4.42211055276382, 193.70230425),
    (4.72361809045226, 226.9207395),
    (5.0251256281407, 226.9207395),
    (5.32663316582914, 226.9207395),
    (5.62814070351759, 226.9207395),
    (5.92964824120603, 226.9207395),
    (6.23115577889447, 259.7077665),
    (6.53266331658291, 259.7077665),
    (6.83417085427136, 293.35761),
    (7.1356783919598, 293.35761),
    (7.43718592964824, 293.35761),
    (7.73869346733668, 293.35761),
    (8.04020100502512, 293.35761),
    (8.34170854271357, 326.144637),
    (8.64321608040201, 326.144637),
    (8.94472361809045, 326.144637),
    (9.24623115577889, 374.462361),
    (9.54773869346733, 374.462361),
    (9.84924623115577, 374.462361),
    (10.1507537688442, 374.462361),
    (10.4522613065327, 422.780085),
    (10.7537688442211, 422.780085),
    (11.0552763819095, 422.780085),
    (11.356783919598, 422.780085),
    (11.6582914572864, 422.780085),
    (11.9597989949749, 422.780085),
    (12.2613065326633, 477.1375245),
    (12.5628140703518, 477.1375245),
    (12.8643216080402, 477.1375245),
    (13.1658291457286, 477.1375245),
    (13.4673366834171, 531.494964),
    (13.7688442211055, 531.494964),
    (14.070351758794, 566.8704405),
    (14.3718592964824, 566.8704405),
    (14.6733668341708, 603.1087335),
    (14.9748743718593, 603.1087335),
    (15.2763819095477, 603.1087335),
    (15.5778894472362, 603.1087335),
    (15.8793969849246, 603.1087335),
    (16.1809045226131, 669.11419575),
    (16.4824120603015, 669.11419575),
    (16.78391959799, 669.11419575),
    (17.0854271356784, 733.82543325),
    (17.3869346733668, 733.82543325),
    (17.6884422110553, 733.82543325),
    (17.9899497487437, 797.242446),
    (18.2914572864322, 797.242446),
    (18.5929648241206, 797.242446),
    (18.894472361809, 797.242446),
    (19.1959798994975, 797.242446),
    (19.4974874371859, 797.242446),
    (19.7989949748744, 861.9536835),
    (20.1005025125628, 861.9536835),
    (20.4020100502512, 861.9536835),
    (20.7035175879397, 861.9536835),
    (21.0050251256281, 930.54759525),
    (21.3065326633166, 930.54759525),
    (21.608040201005, 930.54759525),
    (21.9095477386935, 930.54759525),
    (22.2110552763819, 930.54759525),
    (22.5125628140703, 999.141507),
    (22.8140703517588, 999.141507),
    (23.1155778894472, 999.141507),
    (23.4170854271357, 999.141507),
    (23.7185929648241, 1063.8527445),
    (24.0201005025126, 1063.8527445),
    (24.321608040201, 1063.8527445),
    (24.6231155778894, 1063.8527445),
    (24.9246231155779, 1063.8527445),
    (25.2261306532663, 1063.8527445),
    (25.5276381909548, 1063.8527445),
    (25.8291457286432, 1063.8527445),
    (26.1306532663317, 1063.8527445),
    (26.4321608040201, 1063.8527445),
    (26.7336683417085, 1129.85820675),
    (27.035175879397, 1129.85820675),
    (27.3366834170854, 1129.85820675),
    (27.6381909547739, 1129.85820675),
    (27.9396984924623, 1177.7445225),
    (28.2412060301507, 1177.7445225),
    (28.5427135678392, 1177.7445225),
    (28.8442211055276, 1177.7445225),
    (29.1457286432161, 1177.7445225),
    (29.4472361809045, 1177.7445225),
    (29.748743718593, 1177.7445225),
    (30.0502512562814, 1177.7445225),
    (30.3517587939698, 1177.7445225),
    (30.6532663316583, 1177.7445225),
    (30.9547738693467, 1177.7445225),
    (31.2562814070352, 1177.7445225),
    (31.5577889447236, 1177.7445225),
    (31.8592964824121, 1177.7445225),
    (32.1608040201005, 1177.7445225),
    (32.4623115577889, 1177.7445225),
    (32.7638190954774, 1177.7445225),
    (33.0653266331658, 1177.7445225),
    (33.3668341708543, 1226.925063),
    (33.6683417085427, 1226.925063),
    (33.9698492462311, 1226.925063),
    (34.2713567839196, 1226.925063),
    (34.572864321608, 1226.925063),
    (34.8743718592965, 1226.925063),
    (35.1758793969849, 1226.925063),
    (35.4773869346734, 1226.925063),
    (35.7788944723618, 1226.925063),
    (36.0804020100502, 1226.925063),
    (36.3819095477387, 1226.925063),
    (36.6834170854271, 1226.925063),
    (36.9849246231156, 1226.925063),
    (37.286432160804, 1226.925063),
    (37.5879396984925, 1226.925063),
    (37.8894472361809, 1226.925063),
    (38.1909547738693, 1226.925063),
    (38.4924623115578, 1226.925063),
    (38.7939698492462, 1226.925063),
    (39.0954773869347, 1226.925063),
    (39.3969849246231, 1226.925063),
    (39.6984924623115, 1226.925063),
    (40, 1226.925063),
]
