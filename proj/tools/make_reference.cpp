// Regenerates configs/reference/cosine_bands.csv from the finite-difference
// oracle: Richardson-extrapolated Bloch spectra of -d^2/dx^2 + 2 cos(2 pi x)
// on the path of configs/runs/cosine_bands.json.
//
//   make_reference <out.csv> [n]

#include <iostream>

#include "floquet/oracle.hpp"
#include "floquet/spectral_engine.hpp"

using namespace floquet;

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_reference <out.csv> [n]\n";
        return 2;
    }
    const int n = argc > 2 ? std::atoi(argv[2]) : 2048;
    FourierSeries V(1);
    V.add({1}, 1.0).add({-1}, 1.0);
    MomentumPath path{{{0.0}, {0.5}}, 10};
    BandStructure B;
    B.k_keep = 4;
    B.symbol_name = "cosine_schrodinger_1d";
    for (const auto& xi : path.samples()) {
        B.xi.push_back(xi);
        B.values.push_back(fd_bloch_richardson(V, xi, n, nullptr, B.k_keep));
    }
    write_bands_csv(B, argv[1]);
    return 0;
}
