// Reference numbers and the worked two-frame example bundled for offline
// replay. Values are data, not computations; tests cross-check the internal
// consistency (metric identities, rank correlation) rather than re-derive
// them.

#include "femkit/evalkit.hpp"

namespace femkit::evalkit {

const std::vector<BenchmarkTable>& benchmark_tables() {
    static const std::vector<BenchmarkTable> tables = {
        {"three-waters",
         {
             {"bert", 0.8469, 0.8188, 0.8127, 0.8157},
             {"roberta", 0.8622, 0.8784, 0.7915, 0.8327},
             {"albert", 0.8086, 0.7651, 0.8057, 0.7849},
             {"xlnet", 0.8545, 0.8113, 0.8657, 0.8376},
             {"longformer", 0.8591, 0.8283, 0.8516, 0.8398},
             {"fem", 0.9862, 0.9695, 0.9734, 0.9715},
             {"fem-text-only", 0.8652, 0.8316, 0.8638, 0.8474},
             {"fem-elements-only", 0.9278, 0.9355, 0.9605, 0.9478},
         }},
        {"covid",
         {
             {"bert", 0.8372, 0.8052, 0.8074, 0.8063},
             {"roberta", 0.8547, 0.8539, 0.7867, 0.8190},
             {"albert", 0.8104, 0.7783, 0.8163, 0.7968},
             {"xlnet", 0.8429, 0.8207, 0.8629, 0.8412},
             {"longformer", 0.8546, 0.8617, 0.8694, 0.8655},
             {"fem", 0.9783, 0.9583, 0.9708, 0.9645},
             {"fem-text-only", 0.8865, 0.8737, 0.8826, 0.8781},
             {"fem-elements-only", 0.9132, 0.9195, 0.9361, 0.9277},
         }},
        {"nuclear",
         {
             {"bert", 0.8035, 0.7921, 0.80167, 0.7969},
             {"roberta", 0.8167, 0.8234, 0.7826, 0.8025},
             {"albert", 0.8051, 0.7568, 0.7864, 0.7713},
             {"xlnet", 0.8268, 0.8035, 0.8284, 0.8158},
             {"longformer", 0.8462, 0.8254, 0.8316, 0.8285},
             {"fem", 0.9538, 0.9429, 0.9531, 0.9480},
             {"fem-text-only", 0.8491, 0.8365, 0.8537, 0.8450},
             {"fem-elements-only", 0.9035, 0.9216, 0.9268, 0.9242},
         }},
        {"mixed",
         {
             {"bert", 0.8354, 0.8127, 0.8165, 0.8146},
             {"roberta", 0.8497, 0.8503, 0.7902, 0.8191},
             {"albert", 0.8126, 0.7816, 0.8257, 0.8030},
             {"xlnet", 0.8528, 0.8320, 0.8783, 0.8545},
             {"longformer", 0.8736, 0.8542, 0.8867, 0.8701},
             {"fem", 0.9696, 0.9582, 0.9683, 0.9632},
             {"fem-text-only", 0.8823, 0.8574, 0.8929, 0.8748},
             {"fem-elements-only", 0.9158, 0.9207, 0.9319, 0.9263},
         }},
    };
    return tables;
}

const std::vector<DatasetStat>& dataset_stats() {
    static const std::vector<DatasetStat> stats = {
        {"three-waters", 3262, 823},
        {"covid", 13386, 537},
        {"nuclear", 2431, 482},
        {"mixed", 5915, 469},
    };
    return stats;
}

const std::vector<PairedSimilarityRow>& paired_similarity_rows() {
    static const std::vector<PairedSimilarityRow> rows = {
        {"article", 0.86, 0.8474},
        {"all-elements", 0.61, 0.9478},
        {"minus-problem", 0.79, 0.9046},
        {"minus-causal", 0.62, 0.9454},
        {"minus-moral", 0.81, 0.9065},
        {"minus-treatment", 0.64, 0.9354},
    };
    return rows;
}

const std::vector<TopicSimilarityRow>& topic_similarity_rows() {
    static const std::vector<TopicSimilarityRow> rows = {
        {"article", {0.86, 0.82, 0.83, 0.85}},
        {"all-elements", {0.58, 0.62, 0.59, 0.61}},
        {"minus-problem", {0.83, 0.81, 0.82, 0.83}},
        {"minus-causal", {0.59, 0.62, 0.60, 0.63}},
        {"minus-moral", {0.81, 0.79, 0.81, 0.80}},
        {"minus-treatment", {0.60, 0.64, 0.78, 0.63}},
    };
    return rows;
}

const CasePairFixture& case_pair_fixture() {
    static const CasePairFixture fixture = {
        {"water-reform-political", "political",
         "There's a lot of change being proposed by the government… Fundamentally, they're "
         "considering shifting responsibility for our three waters: water supply, wastewater, "
         "and stormwater, from local government into four large entities... The government now "
         "believes that costs of between $120 billion and $185b will be required: between $4 "
         "and $6b per year on average… The proposed three waters reform program harks back to "
         "the Havelock North water contamination event in 2016… It's on this basis that the "
         "government has concluded that four entities, aggregating all the water services "
         "across the country, offer the best and quickest opportunity to achieve the desired "
         "improvements to the three-waters networks... It's too early to ask the community...",
         "The proposed shift of responsibility for three waters from local government to four "
         "large entities known as water supply entities."},
        {"water-reform-semantic", "semantic",
         "Oh, boy! The government is proposing some exciting changes, folks. Brace yourselves "
         "because they're considering taking control of our beloved three waters. You know, "
         "the precious water supply, wastewater, and stormwater that our local government has "
         "been responsible for?... The government estimates that we'll need a mind-boggling "
         "$120 billion to $185 billion over the next 30 years… Well, now they want to hand it "
         "over to these big entities called Water Supply Entities. What a brilliant idea, "
         "right?... And get this – the government thinks it would be cheaper if larger "
         "entities took over the water services. Apparently, they can borrow more, with the "
         "government's backing, of course. I mean, who needs small, local councils when you "
         "can have these big entities making all the decisions for you?...",
         "The proposed government takeover of three waters"},
        0.86,
        0.61,
    };
    return fixture;
}

} // namespace femkit::evalkit
