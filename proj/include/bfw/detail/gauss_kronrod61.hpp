// Gauss-Kronrod 61-point rule on [-1, 1] (30-point Gauss embedded at odd Kronrod indices).

#pragma once

#include <array>

namespace bfw::detail {

inline constexpr std::array<double, 31> kronrod61_nodes = {
    0.00000000000000000e+00,
    5.14718425553176958e-02,
    1.02806937966737030e-01,
    1.53869913608583547e-01,
    2.04525116682309891e-01,
    2.54636926167889846e-01,
    3.04073202273625077e-01,
    3.52704725530878113e-01,
    4.00401254830394393e-01,
    4.47033769538089177e-01,
    4.92480467861778575e-01,
    5.36624148142019899e-01,
    5.79345235826361692e-01,
    6.20526182989242861e-01,
    6.60061064126626961e-01,
    6.97850494793315797e-01,
    7.33790062453226805e-01,
    7.67777432104826195e-01,
    7.99727835821839083e-01,
    8.29565762382768397e-01,
    8.57205233546061099e-01,
    8.82560535792052682e-01,
    9.05573307699907799e-01,
    9.26200047429274326e-01,
    9.44374444748559979e-01,
    9.60021864968307512e-01,
    9.73116322501126268e-01,
    9.83668123279747210e-01,
    9.91630996870404595e-01,
    9.96893484074649540e-01,
    9.99484410050490638e-01,
};

inline constexpr std::array<double, 31> kronrod61_weights = {
    5.14947294294515676e-02,
    5.14261285374590259e-02,
    5.12215478492587722e-02,
    5.08817958987496065e-02,
    5.04059214027823468e-02,
    4.97956834270742064e-02,
    4.90554345550297789e-02,
    4.81858617570871291e-02,
    4.71855465692991539e-02,
    4.60592382710069881e-02,
    4.48148001331626632e-02,
    4.34525397013560693e-02,
    4.19698102151642461e-02,
    4.03745389515359591e-02,
    3.86789456247275930e-02,
    3.68823646518212292e-02,
    3.49793380280600241e-02,
    3.29814470574837260e-02,
    3.09072575623877625e-02,
    2.87540487650412928e-02,
    2.65099548823331016e-02,
    2.41911620780806014e-02,
    2.18280358216091923e-02,
    1.94141411939423812e-02,
    1.69208891890532726e-02,
    1.43697295070458048e-02,
    1.18230152534963417e-02,
    9.27327965951776343e-03,
    6.63070391593129217e-03,
    3.89046112709988405e-03,
    1.38901369867700762e-03,
};

// Weights of the Gauss nodes kronrod61_nodes[1], [3], ..., [29].
inline constexpr std::array<double, 15> gauss30_weights = {
    1.02852652893558840e-01,
    1.01762389748405505e-01,
    9.95934205867952671e-02,
    9.63687371746442596e-02,
    9.21225222377861287e-02,
    8.68997872010829798e-02,
    8.07558952294202154e-02,
    7.37559747377052063e-02,
    6.59742298821804951e-02,
    5.74931562176190665e-02,
    4.84026728305940529e-02,
    3.87991925696270496e-02,
    2.87847078833233693e-02,
    1.84664683110909591e-02,
    7.96819249616660562e-03,
};

}  // namespace bfw::detail
