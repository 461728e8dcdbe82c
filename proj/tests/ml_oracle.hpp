#pragma once

#include <cmath>

#include "tfde/mittag_leffler.hpp"
#include "tfde/quadrature.hpp"

namespace tfde::oracle {

// gamma, beta, Re z, Im z, Re E, Im E; 30-digit contour inversion cross-checked against the series
struct MlRef {
  double g, b, zr, zi, vr, vi;
};
inline const MlRef kMlTable[] = {
    {0.3, 1.0, -50, 0, 0.015228201501814695234, 0},
    {0.3, 1.0, -20, 0, 0.037406226213884453058, 0},
    {0.3, 1.0, -7.5, 0, 0.094995693498016271053, 0},
    {0.3, 1.0, -3, 0, 0.21180263319643578203, 0},
    {0.3, 1.0, -0.9, 0, 0.48384152245239857017, 0},
    {0.3, 1.0, -0.2, 0, 0.81484500985589383636, 0},
    {0.3, 1.0, 0, 0, 1.0, 0},
    {0.3, 1.0, 2, 0, 79485.907625183568623, 0},
    {0.3, 1.0, 4.5, 0, 7.2427577420796285583e+65, 0},
    {0.3, 0.29999999999999999, -50, 0, 0.000090297795269851063585, 0},
    {0.3, 0.29999999999999999, -20, 0, 0.00054462489804465207853, 0},
    {0.3, 0.29999999999999999, -7.5, 0, 0.0035039929745997479615, 0},
    {0.3, 0.29999999999999999, -3, 0, 0.01724331642174413418, 0},
    {0.3, 0.29999999999999999, -0.9, 0, 0.086409861790053576811, 0},
    {0.3, 0.29999999999999999, -0.2, 0, 0.23020403053745248936, 0},
    {0.3, 0.29999999999999999, 0, 0, 0.33427275256419054098, 0},
    {0.3, 0.29999999999999999, 2, 0, 400586.43366882275972, 0},
    {0.3, 0.29999999999999999, 4.5, 0, 2.4213997385036691132e+67, 0},
    {0.3, 1.3, -50, 0, 0.019695435969963706716, 0},
    {0.3, 1.3, -20, 0, 0.048129688689305778826, 0},
    {0.3, 1.3, -7.5, 0, 0.12066724086693116734, 0},
    {0.3, 1.3, -3, 0, 0.26273245560118807931, 0},
    {0.3, 1.3, -0.9, 0, 0.57350941949733491855, 0},
    {0.3, 1.3, -0.2, 0, 0.92577495072053077818, 0},
    {0.3, 1.3, 0, 0, 1.114242508547301855, 0},
    {0.3, 1.3, 2, 0, 39742.453812591779214, 0},
    {0.3, 1.3, 4.5, 0, 1.6095017204621392317e+65, 0},
    {0.3, 4.2999999999999998, -50, 0, 0.0032400375957896538531, 0},
    {0.3, 4.2999999999999998, -20, 0, 0.0077731673083129069633, 0},
    {0.3, 4.2999999999999998, -7.5, 0, 0.018632420807948768007, 0},
    {0.3, 4.2999999999999998, -3, 0, 0.037441860741196793315, 0},
    {0.3, 4.2999999999999998, -0.9, 0, 0.070551479206761375477, 0},
    {0.3, 4.2999999999999998, -0.2, 0, 0.099697006970261333744, 0},
    {0.3, 4.2999999999999998, 0, 0, 0.11292616890111504119, 0},
    {0.3, 4.2999999999999998, 2, 0, 38.55252457547109335, 0},
    {0.3, 4.2999999999999998, 4.5, 0, 4.72678999389968732e+58, 0},
    {0.6, 1.0, -50, 0, 0.0090837447731034546371, 0},
    {0.6, 1.0, -20, 0, 0.022946564273258376396, 0},
    {0.6, 1.0, -7.5, 0, 0.062638906158043226933, 0},
    {0.6, 1.0, -3, 0, 0.15970348026509122069, 0},
    {0.6, 1.0, -0.9, 0, 0.44355688555642167113, 0},
    {0.6, 1.0, -0.2, 0, 0.80818506417111427295, 0},
    {0.6, 1.0, 0, 0, 1.0, 0},
    {0.6, 1.0, 2, 0, 39.692804958505462628, 0},
    {0.6, 1.0, 4.5, 0, 353765.43844786831999, 0},
    {0.6, 0.59999999999999998, -50, 0, 0.00010979389735394112334, 0},
    {0.6, 0.59999999999999998, -20, 0, 0.00069976531797853914304, 0},
    {0.6, 0.59999999999999998, -7.5, 0, 0.0051635894144771513233, 0},
    {0.6, 0.59999999999999998, -3, 0, 0.031693926561557026534, 0},
    {0.6, 0.59999999999999998, -0.9, 0, 0.19218171196918570157, 0},
    {0.6, 0.59999999999999998, -0.2, 0, 0.49090808988821056739, 0},
    {0.6, 0.59999999999999998, 0, 0, 0.67150497244207333521, 0},
    {0.6, 0.59999999999999998, 2, 0, 63.329920771678319988, 0},
    {0.6, 0.59999999999999998, 4.5, 0, 964251.95258986587509, 0},
    {0.6, 1.6000000000000001, -50, 0, 0.019818325104537932138, 0},
    {0.6, 1.6000000000000001, -20, 0, 0.048852671786337084074, 0},
    {0.6, 1.6000000000000001, -7.5, 0, 0.12498147917892757621, 0},
    {0.6, 1.6000000000000001, -3, 0, 0.28009883991163627023, 0},
    {0.6, 1.6000000000000001, -0.9, 0, 0.61827012715953146856, 0},
    {0.6, 1.6000000000000001, -0.2, 0, 0.95907467914442857535, 0},
    {0.6, 1.6000000000000001, 0, 0, 1.1191749540701222511, 0},
    {0.6, 1.6000000000000001, 2, 0, 19.346402479252728688, 0},
    {0.6, 1.6000000000000001, 4.5, 0, 78614.319655081827008, 0},
    {0.6, 4.5999999999999996, -50, 0, 0.0032037896382062384241, 0},
    {0.6, 4.5999999999999996, -20, 0, 0.0075639691111121071782, 0},
    {0.6, 4.5999999999999996, -7.5, 0, 0.017427874908642503871, 0},
    {0.6, 4.5999999999999996, -3, 0, 0.032625042333893996155, 0},
    {0.6, 4.5999999999999996, -0.9, 0, 0.054245979658230248965, 0},
    {0.6, 4.5999999999999996, -0.2, 0, 0.069028182114787759838, 0},
    {0.6, 4.5999999999999996, 0, 0, 0.074731233578400295516, 0},
    {0.6, 4.5999999999999996, 2, 0, 0.27112312341922532347, 0},
    {0.6, 4.5999999999999996, 4.5, 0, 42.539925676494147506, 0},
    {0.8, 1.0, -50, 0, 0.0044677761579029922645, 0},
    {0.8, 1.0, -20, 0, 0.011617250451432777958, 0},
    {0.8, 1.0, -7.5, 0, 0.034847237775122025329, 0},
    {0.8, 1.0, -3, 0, 0.1129201986822173868, 0},
    {0.8, 1.0, -0.9, 0, 0.42078240061689155819, 0},
    {0.8, 1.0, -0.2, 0, 0.81075529383653987028, 0},
    {0.8, 1.0, 0, 0, 1.0, 0},
    {0.8, 1.0, 2, 0, 13.41574888781901468, 0},
    {0.8, 1.0, 4.5, 0, 877.64213691147114024, 0},
    {0.8, 0.80000000000000004, -50, 0, 0.000073315313829055338196, 0},
    {0.8, 0.80000000000000004, -20, 0, 0.00049582520959208668872, 0},
    {0.8, 0.80000000000000004, -7.5, 0, 0.0044426548119865985983, 0},
    {0.8, 0.80000000000000004, -3, 0, 0.039915664251597086191, 0},
    {0.8, 0.80000000000000004, -0.9, 0, 0.28625664504928934843, 0},
    {0.8, 0.80000000000000004, -0.2, 0, 0.66425309611776420608, 0},
    {0.8, 0.80000000000000004, 0, 0, 0.85893701922466749916, 0},
    {0.8, 0.80000000000000004, 2, 0, 16.054157362005888169, 0},
    {0.8, 0.80000000000000004, 4.5, 0, 1278.3251861885512185, 0},
    {0.8, 1.8, -50, 0, 0.019910644476841940155, 0},
    {0.8, 1.8, -20, 0, 0.049419137477428361102, 0},
    {0.8, 1.8, -7.5, 0, 0.12868703496331706329, 0},
    {0.8, 1.8, -3, 0, 0.29569326710592753773, 0},
    {0.8, 1.8, -0.9, 0, 0.64357511042567603057, 0},
    {0.8, 1.8, -0.2, 0, 0.94622353081730059607, 0},
    {0.8, 1.8, 0, 0, 1.0736712740308343144, 0},
    {0.8, 1.8, 2, 0, 6.2078744439095073399, 0},
    {0.8, 1.8, 4.5, 0, 194.80936375810469783, 0},
    {0.8, 4.7999999999999998, -50, 0, 0.0031745785077318073153, 0},
    {0.8, 4.7999999999999998, -20, 0, 0.0073958693313775127944, 0},
    {0.8, 4.7999999999999998, -7.5, 0, 0.016478595384047357343, 0},
    {0.8, 4.7999999999999998, -3, 0, 0.029086884445640114134, 0},
    {0.8, 4.7999999999999998, -0.9, 0, 0.044219310640080342576, 0},
    {0.8, 4.7999999999999998, -0.2, 0, 0.05297012475591388912, 0},
    {0.8, 4.7999999999999998, 0, 0, 0.056060530181225700008, 0},
    {0.8, 4.7999999999999998, 2, 0, 0.11780168384611104124, 0},
    {0.8, 4.7999999999999998, 4.5, 0, 0.62331459210813034382, 0},
    {1, 1.0, -50, 0, 1.928749847963917783e-22, 0},
    {1, 1.0, -20, 0, 2.061153622438557828e-9, 0},
    {1, 1.0, -7.5, 0, 0.0005530843701478335831, 0},
    {1, 1.0, -3, 0, 0.049787068367863942979, 0},
    {1, 1.0, -0.9, 0, 0.40656965974059910286, 0},
    {1, 1.0, -0.2, 0, 0.81873075307798184958, 0},
    {1, 1.0, 0, 0, 1.0, 0},
    {1, 1.0, 2, 0, 7.3890560989306502272, 0},
    {1, 1.0, 4.5, 0, 90.01713130052181355, 0},
    {1, 1.0, -50, 0, 1.928749847963917783e-22, 0},
    {1, 1.0, -20, 0, 2.061153622438557828e-9, 0},
    {1, 1.0, -7.5, 0, 0.0005530843701478335831, 0},
    {1, 1.0, -3, 0, 0.049787068367863942979, 0},
    {1, 1.0, -0.9, 0, 0.40656965974059910286, 0},
    {1, 1.0, -0.2, 0, 0.81873075307798184958, 0},
    {1, 1.0, 0, 0, 1.0, 0},
    {1, 1.0, 2, 0, 7.3890560989306502272, 0},
    {1, 1.0, 4.5, 0, 90.01713130052181355, 0},
    {1, 2.0, -50, 0, 0.02, 0},
    {1, 2.0, -20, 0, 0.049999999896942318878, 0},
    {1, 2.0, -7.5, 0, 0.13325958875064695552, 0},
    {1, 2.0, -3, 0, 0.31673764387737868567, 0},
    {1, 2.0, -0.9, 0, 0.65936704473266764723, 0},
    {1, 2.0, -0.2, 0, 0.90634623461009070179, 0},
    {1, 2.0, 0, 0, 1.0, 0},
    {1, 2.0, 2, 0, 3.1945280494653251136, 0},
    {1, 2.0, 4.5, 0, 19.7815847334492919, 0},
    {1, 5.0, -50, 0, 0.0031411733333333333333, 0},
    {1, 5.0, -20, 0, 0.0072020833333462155435, 0},
    {1, 5.0, -7.5, 0, 0.015387829122961429439, 0},
    {1, 5.0, -3, 0, 0.025306013189726715345, 0},
    {1, 5.0, -0.9, 0, 0.035161804207588952587, 0},
    {1, 5.0, -0.2, 0, 0.040054007071995001956, 0},
    {1, 5.0, 0, 0, 0.041666666666666666667, 0},
    {1, 5.0, 2, 0, 0.065982672849832305869, 0},
    {1, 5.0, 4.5, 0, 0.14437953068257110453, 0},
    {0.6, 1, -3, 4, 0.054056544179472395437, 0.078501963328678042088},
    {0.3, 1.3, 2, 1, -0.53445109146554867507, 2.5213241335294548055},
    {0.8, 1.8, -40, 2, 0.024798221153940163455, 0.001232677744014977938},
    {0.5, 0.5, 1, -20, -0.00070256456907632940655, 0.000070699660337340129632},
    {0.9, 1, -100, 60, 0.00077890841106134745191, 0.00047529831665310202025},
};

// int_0^t (t-s)^{beta-1} E_{gamma,beta}(-q (t-s)^gamma) s^{nu-1} ds by geometric grading toward both ends
inline double convolution_quadrature(double gamma, double beta, double nu, double q, double t) {
  auto f = [&](double s, double u) {
    return std::pow(u, beta - 1.0) * scalar_ml(gamma, beta, -q * std::pow(u, gamma)) * std::pow(s, nu - 1.0);
  };
  const int levels = 60;
  double acc = 0.0;
  for (int side = 0; side < 2; ++side) {
    // d is the distance from the singular end
    double outer = 0.5 * t;
    auto eval = [&](double d) { return side == 0 ? f(d, t - d) : f(t - d, d); };
    for (int k = 0; k < levels; ++k) {
      const double inner = outer * 0.5;
      const Rule r = legendre_on(24, inner, outer);
      for (int i = 0; i < r.size(); ++i) acc += r.w[i] * eval(r.x[i]);
      outer = inner;
    }
    // innermost piece with the endpoint weight
    const double e = side == 0 ? nu - 1.0 : beta - 1.0;
    const Rule r = jacobi_left_on(12, e, 0.0, outer);
    for (int i = 0; i < r.size(); ++i) acc += r.w[i] * std::pow(r.x[i], -e) * eval(r.x[i]);
  }
  return acc;
}

}  // namespace tfde::oracle
