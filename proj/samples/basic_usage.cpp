// Runs one spiking GeMM through the prefix-reuse engine and prints what it did.

#include <cstdio>
#include <string>

#include "prosparse/prosparse.hpp"

using namespace prosparse;

int main() {
    const auto spikes = SpikeMatrix::from_strings({"1010", "1001", "1011", "0010", "1101", "1101"});
    const WeightMatrix<std::int8_t> weights(4, 2, {1, -1, 2, 0, 3, 5, 4, -2});
    const GemmProblem<std::int8_t> problem{spikes, weights, TileConfig{6, 2, 4}};

    const auto meta = build_meta(spikes);
    std::printf("row  spikes  prefix  pattern  kind\n");
    for (std::size_t r = 0; r < spikes.rows(); ++r) {
        const auto& e = meta.table[r];
        std::string pattern;
        for (std::size_t c = 0; c < spikes.cols(); ++c) pattern += (e.pattern >> c & 1) ? '1' : '0';
        std::printf("%3zu  %s    %6s  %s     %s\n", r, spikes.to_strings()[r].c_str(),
                    e.prefix ? std::to_string(*e.prefix).c_str() : "-", pattern.c_str(), to_string(meta.table.kind(r)));
    }

    const auto pro = prosparse_gemm(problem);
    const auto bits = bitsparse_gemm(problem);
    std::printf("\noutput matches dense: %s\n", pro.output == dense_gemm(problem) ? "yes" : "no");
    std::printf("accumulations: bit-sparse %llu, prosparsity %llu\n", static_cast<unsigned long long>(bits.accumulations),
                static_cast<unsigned long long>(pro.stats.totals.accumulations));

    const auto d = density_metrics(spikes, problem.tile);
    std::printf("bit density %.3f, pro density %.3f, reduction %.2fx\n", d.bit_density(), d.pro_density(),
                d.reduction());

    const auto run = baseline_and_speedup(problem);
    std::printf("cycles (compute): dense %llu, bit-sparse %llu, prosparsity %llu\n",
                static_cast<unsigned long long>(run.mode(ExecMode::dense).compute),
                static_cast<unsigned long long>(run.mode(ExecMode::bitsparse).compute),
                static_cast<unsigned long long>(run.mode(ExecMode::prosparsity).compute));
    return 0;
}
