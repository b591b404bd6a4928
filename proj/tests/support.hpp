#ifndef CRNLYAP_TESTS_SUPPORT_HPP
#define CRNLYAP_TESTS_SUPPORT_HPP

#include <cmath>
#include <string>
#include <vector>

#include "crnlyap/crnlyap.hpp"

namespace testing_support {

inline std::string fixture_path(const std::string& name) { return std::string(CRNLYAP_FIXTURES) + "/" + name; }

inline crnlyap::NetworkDocument load(const std::string& name) { return crnlyap::read_network_file(fixture_path(name)); }

inline crnlyap::Network net(const std::string& text) { return crnlyap::parse_network(text).network; }

inline crnlyap::Network net_a(double k1 = 1, double k2 = 1) {
    return net("S1 -> S2 ; k=" + crnlyap::format_double(k1) + "\nS2 -> S1 ; k=" + crnlyap::format_double(k2) + "\n");
}

inline crnlyap::Network net_b(double k1 = 1, double k2 = 1) {
    return net("S1 -> S2 ; k=" + crnlyap::format_double(k1) + "\n2 S2 -> 2 S1 ; k=" + crnlyap::format_double(k2) + "\n");
}

inline crnlyap::Network net_c(double k1 = 1, double k2 = 1, double k3 = 1) {
    using crnlyap::format_double;
    return net("2 S1 -> S1 + S2 ; k=" + format_double(k1) + "\n2 S2 -> S2 + S3 ; k=" + format_double(k2) +
               "\n2 S3 -> S3 + S1 ; k=" + format_double(k3) + "\n");
}

inline crnlyap::Network net_e(double k1 = 1, double k2 = 1) {
    return net("S1 + 2 S2 -> 3 S2 ; k=" + crnlyap::format_double(k1) + "\n2 S2 -> S1 + S2 ; k=" +
               crnlyap::format_double(k2) + "\n");
}

inline crnlyap::Network triangle(double k1 = 1, double k2 = 1, double k3 = 1) {
    using crnlyap::format_double;
    return net("S1 -> S2 ; k=" + format_double(k1) + "\nS2 -> S3 ; k=" + format_double(k2) + "\nS3 -> S1 ; k=" +
               format_double(k3) + "\n");
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace testing_support

#endif  // CRNLYAP_TESTS_SUPPORT_HPP
