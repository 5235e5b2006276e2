#include "doctest.h"

#include <filesystem>

#include "axel/io.hpp"

using namespace axel;

TEST_CASE("config hash is stable and key-order independent") {
    const io::json a = {{"lr", 0.01}, {"layers", 2}};
    const io::json b = {{"layers", 2}, {"lr", 0.01}};
    CHECK(io::config_hash(a) == io::config_hash(b));
    const io::json c = {{"layers", 3}, {"lr", 0.01}};
    CHECK(io::config_hash(a) != io::config_hash(c));
}

TEST_CASE("labels csv round trip with provenance header") {
    diffusion::DiffusionResult res;
    res.probs = {1.0, 0.25, 0.0};
    res.stderrs = {0.0, 0.01, 0.0};
    res.num_simulations = 100;
    const auto path = std::filesystem::temp_directory_path() / "axel_labels_rt.csv";
    io::write_labels_csv(path, res, "deadbeef", 42);
    const auto back = io::read_labels_csv(path);
    REQUIRE(back.probs.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.probs[i] == res.probs[i]);
        CHECK(back.stderrs[i] == res.stderrs[i]);
    }
}

TEST_CASE("checkpoint round trip preserves every parameter bitwise") {
    for (auto variant : {gnn::Variant::full, gnn::Variant::sim}) {
        gnn::ModelConfig cfg;
        cfg.num_layers = 2;
        cfg.hidden_dim = 6;
        cfg.segment_size = 4;  // uneven split: segments of width 4 and 2
        cfg.variant = variant;
        cfg.head = gnn::Head::regress_unit;
        Rng init(123);
        gnn::Model m = gnn::build_model(cfg, 5, init);
        m.layers[0].log_beta->value.at(0, 0) = 0.37;
        m.layers[1].theta_raw->value.at(0, 0) = -1.21;

        const auto path = std::filesystem::temp_directory_path() /
                          ("axel_ckpt_" + gnn::to_string(variant) + ".json");
        io::save_checkpoint(path, m);
        const gnn::Model back = io::load_checkpoint(path);

        const auto pa = m.parameters();
        const auto pb = back.parameters();
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) {
            REQUIRE(pa[i]->value.same_shape(pb[i]->value));
            for (int k = 0; k < pa[i]->value.size(); ++k)
                CHECK(pa[i]->value.data[k] == pb[i]->value.data[k]);
        }
        CHECK(back.cfg.segment_size == cfg.segment_size);
        CHECK(back.cfg.head == gnn::Head::regress_unit);
    }
}

TEST_CASE("checkpoint loader rejects foreign payloads") {
    CHECK_THROWS_AS(io::checkpoint_from_json(io::json{{"format", "something-else"}}),
                    FormatError);
}
