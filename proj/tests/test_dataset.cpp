#include "itcr/dataset.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace itcr;

namespace {

Dataset parse(const std::string& matrix, const std::string& classmap)
{
    std::istringstream m(matrix), c(classmap);
    return parse_dataset(m, c);
}

std::string error_text(const std::string& matrix, const std::string& classmap)
{
    try {
        parse(matrix, classmap);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

const char* kMatrix = "compound_id,response,a,b\n"
                      "c1,0,1.5,2\n"
                      "c2,1,-3,4e-2\n"
                      "c3,1,0,7\n";
const char* kClassmap = "predictor_id,class\na,TS\nb,3D\n";

} // namespace

TEST_CASE("well-formed files parse in file order")
{
    const Dataset d = parse(kMatrix, kClassmap);
    CHECK(d.compounds() == 3);
    CHECK(d.predictors() == 2);
    CHECK(d.compound_ids == std::vector<std::string>{"c1", "c2", "c3"});
    CHECK(d.predictor_ids == std::vector<std::string>{"a", "b"});
    CHECK(d.values(1, 0) == -3.0);
    CHECK(d.values(1, 1) == 0.04);
    CHECK(d.response(0) == 0);
    CHECK(d.response(2) == 1);
    CHECK(d.classes[1] == PredictorClass::D3);
    CHECK(validate(d).is_valid());
}

TEST_CASE("malformed inputs name the offending location")
{
    SUBCASE("non-numeric cell")
    {
        const auto msg = error_text("compound_id,response,a,b\nc1,0,abc,2\nc2,1,1,1\n", kClassmap);
        CHECK(msg.find("non-numeric") != std::string::npos);
        CHECK(msg.find("c1") != std::string::npos);
        CHECK(msg.find("a") != std::string::npos);
    }
    SUBCASE("unknown class")
    {
        const auto msg = error_text(kMatrix, "predictor_id,class\na,XX\nb,TS\n");
        CHECK(msg.find("unknown class") != std::string::npos);
    }
    SUBCASE("response outside {0,1}")
    {
        CHECK_FALSE(error_text("compound_id,response,a,b\nc1,2,1,2\nc2,1,1,1\n", kClassmap).empty());
    }
    SUBCASE("predictor missing from class map")
    {
        const auto msg = error_text(kMatrix, "predictor_id,class\na,TS\n");
        CHECK(msg.find("missing from class map") != std::string::npos);
    }
    SUBCASE("class map entry absent from matrix")
    {
        const auto msg = error_text(kMatrix, "predictor_id,class\na,TS\nb,TC\nz,AP\n");
        CHECK(msg.find("not present in matrix") != std::string::npos);
    }
    SUBCASE("duplicate compound id")
    {
        const auto msg = error_text("compound_id,response,a,b\nc1,0,1,2\nc1,1,1,1\n", kClassmap);
        CHECK(msg.find("duplicate") != std::string::npos);
    }
    SUBCASE("bad header")
    {
        CHECK_FALSE(error_text("id,y,a,b\nc1,0,1,2\nc2,1,1,1\n", kClassmap).empty());
    }
    SUBCASE("missing file")
    {
        CHECK_THROWS_AS(load_dataset("/nonexistent/m.csv", "/nonexistent/c.csv"), ValidationError);
    }
}

TEST_CASE("validate reports invariant violations without throwing")
{
    Dataset d = parse(kMatrix, kClassmap);
    SUBCASE("response entry 2")
    {
        d.response(1) = 2;
        const auto r = validate(d);
        CHECK_FALSE(r.is_valid());
    }
    SUBCASE("duplicated predictor id")
    {
        d.predictor_ids[1] = "a";
        CHECK_FALSE(validate(d).is_valid());
    }
    SUBCASE("non-finite value")
    {
        d.values(0, 0) = std::numeric_limits<double>::infinity();
        CHECK_FALSE(validate(d).is_valid());
    }
    SUBCASE("validate is pure")
    {
        const auto a = validate(d);
        const auto b = validate(d);
        CHECK(a.errors.size() == b.errors.size());
        CHECK(a.warnings.size() == b.warnings.size());
    }
}

TEST_CASE("save then load reproduces values bit-exactly")
{
    Dataset d = parse(kMatrix, kClassmap);
    d.values(0, 0) = 0.1 + 0.2;
    d.values(2, 1) = -1.2345678901234567e-300;
    d.values(1, 0) = 1.0 / 3.0;
    const auto dir = std::filesystem::temp_directory_path() / "itcr_dataset_roundtrip";
    std::filesystem::create_directories(dir);
    save_dataset(d, dir / "m.csv", dir / "c.csv");
    const Dataset back = load_dataset(dir / "m.csv", dir / "c.csv");
    CHECK(back.values == d.values);
    CHECK(back.response == d.response);
    CHECK(back.classes == d.classes);
    CHECK(back.predictor_ids == d.predictor_ids);
    std::filesystem::remove_all(dir);
}

TEST_CASE("subset_by_class")
{
    Dataset d;
    d.compound_ids = {"x", "y"};
    d.predictor_ids = {"t1", "a1", "t2", "a2", "a3"};
    d.values = Matrix::Random(2, 5);
    d.response = Eigen::VectorXi::Zero(2);
    d.classes = {PredictorClass::TS, PredictorClass::AP, PredictorClass::TS, PredictorClass::AP, PredictorClass::AP};

    SUBCASE("all five classes is the identity")
    {
        const Dataset all = subset_by_class(d, {kAllClasses.begin(), kAllClasses.end()});
        CHECK(all.values == d.values);
        CHECK(all.predictor_ids == d.predictor_ids);
    }
    SUBCASE("one class keeps its columns in order")
    {
        const Dataset ts = subset_by_class(d, {PredictorClass::TS});
        CHECK(ts.predictors() == 2);
        CHECK(ts.predictor_ids == std::vector<std::string>{"t1", "t2"});
        CHECK(ts.compound_ids == d.compound_ids);
    }
    SUBCASE("absent class is an error")
    {
        CHECK_THROWS_AS(subset_by_class(d, {PredictorClass::QC}), ValidationError);
    }
    SUBCASE("union property")
    {
        const Dataset both = subset_by_class(d, {PredictorClass::TS, PredictorClass::AP});
        const Dataset ts = subset_by_class(d, {PredictorClass::TS});
        const Dataset ap = subset_by_class(d, {PredictorClass::AP});
        std::vector<std::string> joined = ts.predictor_ids;
        joined.insert(joined.end(), ap.predictor_ids.begin(), ap.predictor_ids.end());
        std::sort(joined.begin(), joined.end());
        auto ids = both.predictor_ids;
        std::sort(ids.begin(), ids.end());
        CHECK(ids == joined);
    }
}

TEST_CASE("class labels")
{
    CHECK(to_string(PredictorClass::D3) == "3D");
    CHECK(parse_predictor_class("3D") == PredictorClass::D3);
    CHECK_FALSE(parse_predictor_class("D3").has_value());
    CHECK(join_classes(parse_class_list("AP+TS,TC")) == "TS+TC+AP");
    CHECK_THROWS_AS(parse_class_list("TS+XX"), ValidationError);
}
