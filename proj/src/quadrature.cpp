#include "fracfem/quadrature.hpp"

#include <array>

namespace fracfem {

namespace {

constexpr std::array<TriQuadPoint, 7> kDegree5 = [] {
    std::array<TriQuadPoint, 7> pts{};
    pts[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225};
    const double a1 = 0.0597158717897698, b1 = 0.4701420641051151;
    const double w1 = 0.1323941527885062;
    pts[1] = {a1, b1, b1, w1};
    pts[2] = {b1, a1, b1, w1};
    pts[3] = {b1, b1, a1, w1};
    const double a2 = 0.7974269853530873, b2 = 0.1012865073234563;
    const double w2 = 0.1259391805448271;
    pts[4] = {a2, b2, b2, w2};
    pts[5] = {b2, a2, b2, w2};
    pts[6] = {b2, b2, a2, w2};
    return pts;
}();

constexpr std::array<TriQuadPoint, 19> kDegree9 = [] {
    std::array<TriQuadPoint, 19> pts{};
    int k = 0;
    pts[k++] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0971357962827961};
    const auto push3 = [&](double a, double b, double w) {
        pts[k++] = {a, b, b, w};
        pts[k++] = {b, a, b, w};
        pts[k++] = {b, b, a, w};
    };
    push3(0.0206349616025259, 0.4896825191987370, 0.0313347002271398);
    push3(0.1258208170141290, 0.4370895914929355, 0.0778275410047754);
    push3(0.6235929287619356, 0.1882035356190322, 0.0796477389272090);
    push3(0.9105409732110941, 0.0447295133944530, 0.0255776756586981);
    const double a = 0.0368384120547363, b = 0.2219629891607657, c = 0.7411985987844980;
    const double w = 0.0432835393772894;
    pts[k++] = {a, b, c, w};
    pts[k++] = {a, c, b, w};
    pts[k++] = {b, a, c, w};
    pts[k++] = {b, c, a, w};
    pts[k++] = {c, a, b, w};
    pts[k++] = {c, b, a, w};
    return pts;
}();

}  // namespace

std::span<const TriQuadPoint> tri_rule_degree5() { return kDegree5; }
std::span<const TriQuadPoint> tri_rule_degree9() { return kDegree9; }

}  // namespace fracfem
