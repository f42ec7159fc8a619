#include <spinforge/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace spinforge;

TEST(ChainJson, PstRoundTrip) {
    ChainDocument d = chain_document(standard_couplings(6));
    d.provenance.command = "spinforge design pst --n 6";
    d.provenance.tolerances["mirror"] = 1e-9;
    const json j = to_json(d);
    EXPECT_EQ(j.at("kind"), "pst");
    EXPECT_EQ(j.at("schema_version"), chain_schema_version);
    const ChainDocument back = chain_from_json(json::parse(dump(j)));
    EXPECT_EQ(back.couplings, d.couplings);
    EXPECT_EQ(back.provenance.command, d.provenance.command);
    EXPECT_EQ(back.provenance.tolerances.at("mirror"), 1e-9);
    EXPECT_EQ(to_pst(back).couplings, standard_couplings(6).couplings);
}

TEST(ChainJson, PstDocumentBecomesIsing) {
    const IsingChain c = to_ising(chain_document(standard_couplings(8)));
    EXPECT_EQ(c.n, 4);
    EXPECT_EQ(c.b, standard_ising(4).b);
}

TEST(ChainJson, IsingRoundTrip) {
    const IsingChain c = standard_ising(5);
    const IsingChain back = to_ising(chain_from_json(to_json(chain_document(c))));
    EXPECT_EQ(back.b, c.b);
    EXPECT_EQ(back.j, c.j);
}

TEST(ChainJson, ZyRoundTrip) {
    const StructuredX x = interpolate_gamma(4, 0.0, 0.3, FlowMode::unitary, 0.05).x;
    const ChainDocument d = chain_document(x);
    ASSERT_TRUE(d.gamma.has_value());
    const StructuredX back = to_structured(chain_from_json(to_json(d)));
    EXPECT_LE((back.x - x.x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ChainJson, XxRoundTrip) {
    const RealSymTridiag w = RealSymTridiag::zero_diagonal({1.0, 2.0, 0.5});
    const ChainDocument d = chain_document(w, 1.25);
    EXPECT_EQ(d.kind, ChainKind::xx);
    EXPECT_EQ(to_tridiag(chain_from_json(to_json(d))).offdiag, w.offdiag);
    EXPECT_THROW(chain_document(RealSymTridiag({0, 1}, {1}), 1.0), IoError);
}

TEST(ChainJson, Rejections) {
    json j = to_json(chain_document(standard_couplings(4)));
    json bad = j;
    bad["schema_version"] = 2;
    EXPECT_THROW(chain_from_json(bad), IoError);
    bad = j;
    bad["kind"] = "heisenberg";
    EXPECT_THROW(chain_from_json(bad), IoError);
    bad = j;
    bad["couplings"] = {1.0};
    EXPECT_THROW(chain_from_json(bad), IoError);
    bad = j;
    bad.erase("fields");
    EXPECT_THROW(chain_from_json(bad), IoError);
    bad = j;
    bad["fields"] = {0.0, 1.0, 0.0, 0.0};
    EXPECT_THROW(chain_from_json(bad), IoError);
    EXPECT_THROW(to_structured(chain_from_json(j)), IoError);
}

TEST(Files, ReadWriteAndMissing) {
    const auto dir = std::filesystem::temp_directory_path() / "spinforge_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "chain.json").string();
    write_text_file(path, dump(to_json(chain_document(standard_couplings(3)))));
    EXPECT_EQ(load_chain(path).n, 3);
    EXPECT_THROW(load_chain((dir / "missing.json").string()), IoError);
    write_text_file(path, "{not json");
    EXPECT_THROW(load_chain(path), IoError);
    std::filesystem::remove_all(dir);
}

TEST(Csv, NumbersRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, 0.0, -2.5})
        EXPECT_EQ(std::strtod(csv_number(v).c_str(), nullptr), v);
    EXPECT_EQ(csv_number(0.5), "0.5");
}

TEST(Csv, SweepLayout) {
    SweepPoint p;
    p.x_percent = 2;
    p.values = {0.9, 0.8};
    p.mean = 0.85;
    p.stddev = 0.07;
    EXPECT_EQ(sweep_csv({p}), "x_percent,sample_index,overlap_estimate\n2,0,0.9\n2,1,0.8\n2,mean,0.85\n");
    EXPECT_EQ(sweep_summary_csv({p}), "x_percent,mean,stddev,samples\n2,0.85,0.07,2\n");
}

TEST(Csv, TraceHeaders) {
    EXPECT_EQ(flow_trace_csv({{1, 0.5, 1e-9, 2e-12, 0.1}}), "step,gamma,sv_drift,structure_residual\n1,0.5,1e-09,2e-12\n");
    EXPECT_EQ(synthesis_trace_csv({{3, 0.25, 0.5, 0.0}}), "iteration,chi,delta,off_band_residual\n3,0.25,0.5,0\n");
}

TEST(Reports, JsonFields) {
    const json g = to_json(overlap_estimate(standard_ising(3)));
    EXPECT_EQ(g.at("method"), "estimator");
    EXPECT_NEAR(g.at("overlap").get<double>(), 1.0, 1e-9);
    const json r = to_json(revival_fixtures().front());
    EXPECT_EQ(r.at("name"), "P2");
    EXPECT_TRUE(r.at("printed_time").is_null());
    EXPECT_EQ(complex_array(ghz_target(1)).size(), 2u);
}
