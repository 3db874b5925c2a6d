#include "foilforge/binio.hpp"
#include "foilforge/error.hpp"
#include "foilforge/models.hpp"
#include "support.hpp"

#include <doctest.h>
#include <filesystem>

using namespace foilforge;
using namespace foilforge::models;
using dataset::CaseId;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

std::size_t dense_params(std::size_t in, std::size_t out) {
    return in * out + out;
}

dataset::Dataset tiny_dataset(CaseId id, std::size_t airfoils = 5) {
    const auto files = support::corpus_files();
    std::vector<geometry::RawContour> corpus;
    for (std::size_t i = 0; i < airfoils; ++i) {
        corpus.push_back(support::read_contour(files[i * 17 % files.size()]));
    }
    const auto spec = dataset::case_spec(id);
    auto options = dataset::default_sweep(spec);
    options.aoa_grid = {0.0, 4.0, 8.0};
    options.re_grid = spec.uses_re_input ? std::vector<double>{1e5, 1e6} : std::vector<double>{2e6};
    options.threads = 1;
    return dataset::split(dataset::sweep_generate(corpus, spec, options), 0.8, 5);
}

std::vector<const dataset::Sample*> pointers(const dataset::Dataset& d) {
    std::vector<const dataset::Sample*> out;
    for (const auto& s : d.samples) {
        out.push_back(&s);
    }
    return out;
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("DNN widths follow the case") {
    const auto c3 = build_dnn(dataset::case_spec(CaseId::c3));
    CHECK(c3.network.input_shape() == nn::Shape{252});
    CHECK(c3.network.output_shape() == nn::Shape{250});
    const std::size_t expected = dense_params(252, 125) + dense_params(125, 250) + dense_params(250, 236) +
                                 dense_params(236, 375) + dense_params(375, 250);
    CHECK(c3.network.parameter_count() == expected);
    CHECK(expected == 305236);

    const auto c2a = build_dnn(dataset::case_spec(CaseId::c2a));
    CHECK(c2a.network.input_shape() == nn::Shape{251});
    CHECK(c2a.network.output_shape() == nn::Shape{250});

    const std::array<std::size_t, 1> one{64};
    const auto small = build_dnn(dataset::case_spec(CaseId::c4b), one);
    CHECK(small.network.layers().size() == 3);
    CHECK(small.network.output_shape() == nn::Shape{250});
}

TEST_CASE("CNN maps match the reference table") {
    const auto m = build_cnn(dataset::case_spec(CaseId::c2a));
    const auto& net = m.network;
    CHECK(net.input_shape() == nn::Shape{1, 200, 200});
    std::vector<std::size_t> sides;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const auto k = net.layers()[i].kind;
        if (k == nn::LayerKind::conv2d || k == nn::LayerKind::maxpool2d) {
            sides.push_back(net.shape(i + 1)[1]);
        }
    }
    CHECK(sides == std::vector<std::size_t>{198, 99, 97, 48, 46, 23});
    std::size_t flat = 0;
    std::size_t head_in = 0;
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        if (net.layers()[i].kind == nn::LayerKind::flatten) {
            flat = net.shape(i + 1)[0];
        }
        if (net.layers()[i].kind == nn::LayerKind::concat_scalars) {
            head_in = net.shape(i + 1)[0];
        }
    }
    CHECK(flat == 67712);
    CHECK(flat == 23 * 23 * 128);
    CHECK(head_in == 67713);
    CHECK(net.output_shape() == nn::Shape{250});

    const auto c5 = build_cnn(dataset::case_spec(CaseId::c5));
    for (std::size_t i = 0; i < c5.network.layers().size(); ++i) {
        if (c5.network.layers()[i].kind == nn::LayerKind::concat_scalars) {
            CHECK(c5.network.shape(i + 1)[0] == 67712 + 2);
        }
    }
}

TEST_CASE("model kind tags") {
    CHECK(parse_model_kind("dnn") == ModelKind::dnn);
    CHECK(parse_model_kind("cnn") == ModelKind::cnn);
    CHECK(to_string(ModelKind::cnn) == "cnn");
    CHECK(code_of([] { parse_model_kind("rnn"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("zero parameters predict zeros of the right size") {
    const auto fwd = build_dnn(dataset::case_spec(CaseId::c2a));
    auto ck = initial_checkpoint(fwd, 0);
    ck.params = nn::zero_parameters(fwd.network);
    panelflow::CpDistribution cp;
    cp.cp_suction.fill(-0.5);
    cp.cp_pressure.fill(0.3);
    const auto shape = predict_shape(ck, cp, {5.0, 2e6, 0.5});
    CHECK(shape.points.size() == 125);
    for (const auto& p : shape.points) {
        CHECK(p.x == 0.0);
        CHECK(p.y == 0.0);
    }

    const auto inv = build_dnn(dataset::case_spec(CaseId::c4a));
    auto ci = initial_checkpoint(inv, 0);
    ci.params = nn::zero_parameters(inv.network);
    const auto out = predict_cp(ci, support::naca_airfoil(0.0, 0.0, 0.12, "NACA 0012"), {5.0, 2e6, 0.5});
    CHECK(out.cp_suction.size() == 125);
    CHECK(out.cp_pressure.size() == 125);
    for (std::size_t k = 0; k < 125; ++k) {
        CHECK(out.cp_suction[k] == 0.0);
        CHECK(out.cp_pressure[k] == 0.0);
    }
    CHECK(out.cl == 0.0);

    CHECK(code_of([&] { predict_cp(ck, support::naca_airfoil(0.0, 0.0, 0.12, "x"), {}); }) == ErrorCode::CaseMismatch);
    CHECK(code_of([&] { predict_shape(ci, cp, {}); }) == ErrorCode::CaseMismatch);
}

TEST_CASE("unpack splits the output blocks") {
    std::vector<double> out(250);
    for (std::size_t i = 0; i < 250; ++i) {
        out[i] = static_cast<double>(i);
    }
    const auto a = unpack_shape(out, "u");
    CHECK(a.points[3].x == 3.0);
    CHECK(a.points[3].y == 128.0);
    const auto cp = unpack_cp(out, {});
    CHECK(cp.cp_suction[124] == 124.0);
    CHECK(cp.cp_pressure[0] == 125.0);
    CHECK(code_of([] { unpack_shape(std::vector<double>(249), "bad"); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("checkpoint round trip is bit exact") {
    for (auto kind : {ModelKind::dnn, ModelKind::cnn}) {
        const auto spec = dataset::case_spec(CaseId::c5);
        const auto model = kind == ModelKind::dnn ? build_dnn(spec) : build_cnn(spec);
        auto ck = initial_checkpoint(model, 99);
        ck.config.epochs = 7;
        ck.config.batch_size = 3;
        ck.config.learning_rate = 2.5e-3;
        ck.train_loss = 0.125;
        ck.test_loss = 0.25;
        const auto bytes = serialize(ck);
        const auto back = deserialize(bytes);
        CHECK(back.params == ck.params);
        CHECK(back.model.kind == kind);
        CHECK(back.model.case_spec == spec);
        CHECK(back.model.network.layers() == model.network.layers());
        CHECK(back.seed == 99);
        CHECK(back.config.epochs == 7);
        CHECK(back.config.batch_size == 3);
        CHECK(back.config.learning_rate == 2.5e-3);
        CHECK(back.train_loss == 0.125);
        CHECK(back.test_loss == 0.25);
        CHECK(serialize(back) == bytes);
    }
}

TEST_CASE("checkpoint save, load, predict replays exactly") {
    const auto data = tiny_dataset(CaseId::c3, 2);
    const auto model = build_dnn(data.case_spec);
    const auto ck = initial_checkpoint(model, 4);
    const auto path = (std::filesystem::temp_directory_path() / "foilforge_test_ck.afnc").string();
    save_checkpoint(ck, path);
    const auto back = load_checkpoint(path);
    std::filesystem::remove(path);
    const auto ptrs = pointers(data);
    CHECK(predict_raw(back, ptrs) == predict_raw(ck, ptrs));
}

TEST_CASE("checkpoint corruption is detected") {
    const auto model = build_dnn(dataset::case_spec(CaseId::c2a));
    const auto bytes = serialize(initial_checkpoint(model, 1));

    auto magic = bytes;
    magic[1] ^= 0xFF;
    CHECK(code_of([&] { deserialize(magic); }) == ErrorCode::BadMagic);

    auto version = bytes;
    version[4] = 2;
    CHECK(code_of([&] { deserialize(version); }) == ErrorCode::VersionMismatch);

    std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 12);
    cut.insert(cut.end(), bytes.end() - 4, bytes.end());
    const auto code = code_of([&] { deserialize(cut); });
    CHECK((code == ErrorCode::TruncatedFile || code == ErrorCode::SpecMismatch));

    auto flipped = bytes;
    flipped[bytes.size() - 100] ^= 0x10;
    CHECK(code_of([&] { deserialize(flipped); }) == ErrorCode::ChecksumMismatch);

    // Layer 0 dense input width altered: the table no longer fits the case.
    auto table = bytes;
    table[13] ^= 0x01;
    const auto table_code = code_of([&] { deserialize(table); });
    CHECK(table_code == ErrorCode::SpecMismatch);
}

TEST_CASE("training records one entry per epoch and is deterministic") {
    support::QuietLog quiet;
    const auto data = tiny_dataset(CaseId::c2a);
    const std::array<std::size_t, 2> hidden{32, 32};
    const auto model = build_dnn(data.case_spec, hidden);
    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.batch_size = 4;
    cfg.learning_rate = 1e-3;
    cfg.seed = 21;
    const auto a = train(model, data, cfg);
    const auto b = train(model, data, cfg);
    CHECK(a.history.size() == 6);
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_loss == b.history[i].train_loss);
        CHECK(a.history[i].test_loss == b.history[i].test_loss);
    }
    CHECK(a.checkpoint.params == b.checkpoint.params);
    CHECK(serialize(a.checkpoint) == serialize(b.checkpoint));
    CHECK(a.history.front().train_loss < a.initial_train_loss);
    CHECK(a.checkpoint.train_loss == a.history.back().train_loss);
    CHECK(a.checkpoint.test_loss == a.history.back().test_loss);

    cfg.threads = 3;
    const auto c = train(model, data, cfg);
    CHECK(c.checkpoint.params == a.checkpoint.params);

    cfg.seed = 22;
    CHECK(train(model, data, cfg).checkpoint.params != a.checkpoint.params);
}

TEST_CASE("epoch-1 loss beats the untrained model in every case") {
    support::QuietLog quiet;
    for (auto id : {CaseId::c1, CaseId::c2a, CaseId::c2b, CaseId::c3, CaseId::c4a, CaseId::c4b, CaseId::c5}) {
        const auto data = tiny_dataset(id, 4);
        const std::array<std::size_t, 2> hidden{32, 32};
        TrainConfig cfg;
        cfg.epochs = 1;
        cfg.batch_size = 4;
        cfg.learning_rate = 1e-3;
        cfg.seed = 8;
        const auto r = train(build_dnn(data.case_spec, hidden), data, cfg);
        CHECK_MESSAGE(r.history.front().train_loss < r.initial_train_loss, dataset::case_tag(id));
    }
}

TEST_CASE("training preconditions") {
    support::QuietLog quiet;
    const auto data = tiny_dataset(CaseId::c2a);
    TrainConfig cfg;
    cfg.epochs = 1;
    CHECK(code_of([&] { train(build_dnn(dataset::case_spec(CaseId::c4a)), data, cfg); }) == ErrorCode::CaseMismatch);
    auto empty = data;
    std::fill(empty.split.begin(), empty.split.end(), dataset::SplitTag::test);
    CHECK(code_of([&] { train(build_dnn(data.case_spec), empty, cfg); }) == ErrorCode::EmptyTrainSplit);
    cfg.batch_size = 0;
    CHECK(code_of([&] { validate(cfg); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("divergence names the epoch") {
    support::QuietLog quiet;
    const auto data = tiny_dataset(CaseId::c2a);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.learning_rate = 1e30;
    cfg.batch_size = 2;
    try {
        train(build_dnn(data.case_spec), data, cfg);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NumericalDivergence);
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

} // TEST_SUITE
