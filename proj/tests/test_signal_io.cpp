#include "ecg/errors.hpp"
#include "ecg/signal_io.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>

using namespace ecg;
using helpers::TmpDir;

TEST_CASE("record CSV round-trips samples bit-exactly") {
    TmpDir tmp;
    SampledSignal sig = helpers::make_signal(
        {0.0, 0.5, -1.25, 1e-17, -3.141592653589793, 12345.6789, 2.2250738585072014e-308},
        360.0, "II");
    const std::string path = tmp.file("rec.csv");
    write_record(sig, path);
    SampledSignal back = load_record(path);
    REQUIRE(back.size() == sig.size());
    CHECK(back.fs == sig.fs);
    CHECK(back.lead == sig.lead);
    for (int i = 0; i < sig.size(); ++i) CHECK(back.samples[i] == sig.samples[i]);
}

TEST_CASE("load_record parses the documented header and rows") {
    TmpDir tmp;
    const std::string path = tmp.file("rec.csv");
    helpers::write_file(path, "fs=360,lead=V5\n0.0\n0.5\n0.0\n");
    SampledSignal sig = load_record(path);
    CHECK(sig.fs == 360.0);
    CHECK(sig.lead == "V5");
    REQUIRE(sig.size() == 3);
    CHECK(sig.samples[1] == 0.5);
}

TEST_CASE("load_record selects a column from multi-channel rows") {
    TmpDir tmp;
    const std::string path = tmp.file("multi.csv");
    helpers::write_file(path, "fs=250,lead=multi\n1.0,10.0\n2.0,20.0\n");
    CHECK(load_record(path, 0).samples == std::vector<double>{1.0, 2.0});
    CHECK(load_record(path, 1).samples == std::vector<double>{10.0, 20.0});
    CHECK_THROWS_AS(load_record(path, 2), FormatError);
}

TEST_CASE("load_record error reporting") {
    TmpDir tmp;
    CHECK_THROWS_AS(load_record(tmp.file("missing.csv")), IoError);

    const std::string bad_header = tmp.file("bad_header.csv");
    helpers::write_file(bad_header, "frequency=360\n0.0\n");
    CHECK_THROWS_AS(load_record(bad_header), FormatError);

    const std::string bad_fs = tmp.file("bad_fs.csv");
    helpers::write_file(bad_fs, "fs=0,lead=x\n0.0\n");
    CHECK_THROWS_AS(load_record(bad_fs), FormatError);

    const std::string bad_row = tmp.file("bad_row.csv");
    helpers::write_file(bad_row, "fs=100,lead=x\n0.0\nnot-a-number\n");
    CHECK_THROWS_AS(load_record(bad_row), FormatError);

    const std::string no_rows = tmp.file("no_rows.csv");
    helpers::write_file(no_rows, "fs=100,lead=x\n");
    CHECK_THROWS_AS(load_record(no_rows), FormatError);
}

TEST_CASE("annotation JSON round-trips including absent fiducials") {
    TmpDir tmp;
    AnnotationSet ann;
    ann.record_id = "rt";
    ann.fs = 360.0;
    BeatAnnotation b1;
    b1.p = 10;
    b1.q = 20;
    b1.r = 30;
    b1.s = 40;
    b1.t = 50;
    b1.t_polarity = Polarity::negative;
    BeatAnnotation b2; // only R present
    b2.r = 200;
    ann.beats = {b1, b2};

    const std::string path = tmp.file("ann.json");
    write_annotations(ann, path);
    AnnotationSet back = load_annotations(path);
    CHECK(back.record_id == "rt");
    CHECK(back.fs == 360.0);
    REQUIRE(back.beats.size() == 2);
    CHECK(back.beats[0].p == 10);
    CHECK(back.beats[0].t == 50);
    CHECK(back.beats[0].t_polarity == Polarity::negative);
    CHECK(back.beats[1].r == 200);
    CHECK_FALSE(back.beats[1].p.has_value());
    CHECK_FALSE(back.beats[1].t.has_value());
    CHECK(back.beats[1].t_polarity == Polarity::positive);
}

TEST_CASE("AnnotationSet::validate rejects broken sets") {
    AnnotationSet ann;
    ann.fs = 360.0;

    SUBCASE("non-increasing r") {
        BeatAnnotation a, b;
        a.r = 100;
        b.r = 100;
        ann.beats = {a, b};
        CHECK_THROWS_AS(ann.validate(), ValidationError);
    }
    SUBCASE("r spacing below 120 ms") {
        BeatAnnotation a, b;
        a.r = 100;
        b.r = 100 + 30; // 83 ms at 360 Hz
        ann.beats = {a, b};
        CHECK_THROWS_AS(ann.validate(), ValidationError);
    }
    SUBCASE("fiducial ordering p < q < r < s < t") {
        BeatAnnotation a;
        a.q = 31;
        a.r = 30;
        ann.beats = {a};
        CHECK_THROWS_AS(ann.validate(), ValidationError);
    }
    SUBCASE("negative index") {
        BeatAnnotation a;
        a.r = -1;
        ann.beats = {a};
        CHECK_THROWS_AS(ann.validate(), ValidationError);
    }
    SUBCASE("valid set passes") {
        BeatAnnotation a, b;
        a.p = 1;
        a.q = 2;
        a.r = 3;
        a.s = 4;
        a.t = 5;
        b.r = 300;
        ann.beats = {a, b};
        CHECK_NOTHROW(ann.validate());
    }
}

TEST_CASE("loading an annotation file that violates invariants fails") {
    TmpDir tmp;
    const std::string path = tmp.file("bad.json");
    helpers::write_file(path, R"({"record_id":"x","fs":360,"beats":[
        {"p":null,"q":null,"r":50,"s":null,"t":null,"t_polarity":"positive"},
        {"p":null,"q":null,"r":40,"s":null,"t":null,"t_polarity":"positive"}]})");
    CHECK_THROWS_AS(load_annotations(path), ValidationError);

    helpers::write_file(path, "{not json");
    CHECK_THROWS_AS(load_annotations(path), FormatError);
}

TEST_CASE("polarity string conversions") {
    CHECK(polarity_from_string("positive") == Polarity::positive);
    CHECK(polarity_from_string("negative") == Polarity::negative);
    CHECK(to_string(Polarity::positive) == std::string("positive"));
    CHECK(to_string(Polarity::negative) == std::string("negative"));
    CHECK_THROWS_AS(polarity_from_string("sideways"), FormatError);
}

TEST_CASE("validate_signal enforces basic signal invariants") {
    CHECK_THROWS_AS(validate_signal(helpers::make_signal({}, 360.0)), ValidationError);
    CHECK_THROWS_AS(validate_signal(helpers::make_signal({1.0}, 0.0)), ValidationError);
    CHECK_THROWS_AS(validate_signal(helpers::make_signal({0.0, NAN}, 360.0)), ValidationError);
    CHECK_NOTHROW(validate_signal(helpers::make_signal({1.0, 2.0}, 360.0)));
}
