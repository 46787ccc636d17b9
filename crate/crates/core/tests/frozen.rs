//! Factors frozen from `tools/freeze_oracle.py`, an independent numpy computation of
//! `||E||_A` by SVD. Jacobi rows use `omega = 2/3` where the label reads 0.6667.

use twogrid::analysis::{exact_factor, inexact_linear_analysis, seminorm_oracle, Iteration};
use twogrid::corpus::{ladder, two_cycles, wheel};
use twogrid::linalg::{spsd_certify, DenseMatrix, TolerancePolicy};
use twogrid::model::{
    aggregation_prolongation, build_hierarchy, generate_problem, ProblemSpec, SmootherSpec, TwoGridHierarchy,
};

/// (problem, smoother, aggregate, TG, STG, ITG with B_c = 2 A_c, spectral radius of E_TG on R(A)).
const FROZEN: &[(&str, &str, usize, f64, f64, f64, f64)] = &[
    ("neumann1d:8", "jacobi:0.5000", 2, 0.6704747573346468, 0.44953640022295327, 0.7493323959055682, 0.5000000000000002),
    ("neumann1d:8", "jacobi:0.5000", 4, 0.8424555267713569, 0.709731314587605, 0.863432865389483, 0.811744900929367),
    ("neumann1d:8", "jacobi:0.6667", 2, 0.6914377643506477, 0.4780861819702217, 0.7506338909748299, 0.33333333333333337),
    ("neumann1d:8", "jacobi:0.6667", 4, 0.8137254137725766, 0.6621490490193513, 0.8404982045292332, 0.7489932012391556),
    ("neumann1d:8", "gs", 2, 0.6556695590127014, 0.4299025706159105, 0.7047559721542332, 0.25),
    ("neumann1d:8", "gs", 4, 0.7824322112950134, 0.6122001652720045, 0.8000225657539507, 0.5000000039390147),
    ("neumann1d:16", "jacobi:0.5000", 2, 0.6992040732990612, 0.48888633611799964, 0.7817240261480235, 0.5000000000000004),
    ("neumann1d:16", "jacobi:0.5000", 4, 0.8857937599074738, 0.7846305850910217, 0.906860633365773, 0.8535533905932734),
    ("neumann1d:16", "jacobi:0.6667", 2, 0.7328970811719988, 0.5371381315904358, 0.7947119623243544, 0.333333333333334),
    ("neumann1d:16", "jacobi:0.6667", 4, 0.8707606638506877, 0.7582241337096927, 0.896972689572702, 0.8047378541243648),
    ("neumann1d:16", "gs", 2, 0.7202693909946104, 0.5187879956037476, 0.7785740116309211, 0.25025092675553495),
    ("neumann1d:16", "gs", 4, 0.860128965175343, 0.7398218367336086, 0.8822278971170967, 0.6545085047471442),
    ("neumann1d:32", "jacobi:0.5000", 2, 0.7052712755593589, 0.4974075721291306, 0.7885175057135492, 0.5000000000000023),
    ("neumann1d:32", "jacobi:0.5000", 4, 0.8910596119283165, 0.7939872320098469, 0.9136569880314809, 0.8535533905932767),
    ("neumann1d:32", "jacobi:0.6667", 2, 0.7423624698132921, 0.5511020365872957, 0.8043717515489378, 0.3333333333333356),
    ("neumann1d:32", "jacobi:0.6667", 4, 0.8794679532535048, 0.7734638807999138, 0.9068449737807097, 0.8047378541243674),
    ("neumann1d:32", "gs", 2, 0.7389364419895157, 0.5460270653001297, 0.799961465391936, 0.25588422251646264),
    ("neumann1d:32", "gs", 4, 0.8827682503399299, 0.7792797838082253, 0.9062123178290338, 0.6547370975051474),
    ("neumann2d:8x8", "jacobi:0.5000", 2, 0.7725483084715322, 0.5968308889222276, 0.810969136707938, 0.7384405894974958),
    ("neumann2d:8x8", "jacobi:0.5000", 4, 0.9181044702136963, 0.8429158182263724, 0.9243222160067622, 0.9124494068590789),
    ("neumann2d:8x8", "jacobi:0.6667", 2, 0.7213367849595113, 0.5203267573357263, 0.7808385081922217, 0.6512541193299906),
    ("neumann2d:8x8", "jacobi:0.6667", 4, 0.8941814375733296, 0.7995604433007069, 0.9045442675370408, 0.8832658758121001),
    ("neumann2d:8x8", "gs", 2, 0.6534735025695909, 0.42702761856057114, 0.7270279768077911, 0.43255196211184643),
    ("neumann2d:8x8", "gs", 4, 0.8207018026868279, 0.6735514489334099, 0.840929180752194, 0.7261396090025054),
    ("graph:two-cycles", "jacobi:0.5000", 2, 0.5590169943749473, 0.31249999999999994, 0.6055196128601378, 0.4999999999999999),
    ("graph:two-cycles", "jacobi:0.5000", 4, 0.7499999999999994, 0.5624999999999997, 0.7499999999999994, 0.7500000000000003),
    ("graph:two-cycles", "jacobi:0.6667", 2, 0.47140452079103157, 0.2222222222222221, 0.5270462766947297, 0.3333333333333335),
    ("graph:two-cycles", "jacobi:0.6667", 4, 0.6666666666666663, 0.4444444444444442, 0.6666666666666663, 0.6666666666666669),
    ("graph:two-cycles", "gs", 2, 0.5217548572244632, 0.2722281310373202, 0.5313309246724814, 0.23911629033633416),
    ("graph:two-cycles", "gs", 4, 0.5814359150715663, 0.3380677233351092, 0.585230403583665, 0.41108254033234287),
    ("graph:ladder", "jacobi:0.5000", 2, 0.6753759678020584, 0.45613269788456634, 0.7384938035134045, 0.6000000000000004),
    ("graph:ladder", "jacobi:0.5000", 4, 0.9187841480290307, 0.84416431066943, 0.919844370387178, 0.9176418683462202),
    ("graph:ladder", "jacobi:0.6667", 2, 0.633272701338863, 0.4010343142610198, 0.7096405751364653, 0.46666666666666723),
    ("graph:ladder", "jacobi:0.6667", 4, 0.8924022255379364, 0.7963817321450598, 0.8941134202538179, 0.8901891577949612),
    ("graph:ladder", "gs", 2, 0.596185837589904, 0.35543755294277435, 0.651324578169172, 0.3016585864839255),
    ("graph:ladder", "gs", 4, 0.7899348593354176, 0.6239970819932644, 0.7962265931140576, 0.7044000296363925),
    ("graph:wheel", "jacobi:0.5000", 2, 0.6400818632685625, 0.40970479168535484, 0.6779283958773997, 0.6022241014803097),
    ("graph:wheel", "jacobi:0.5000", 4, 0.7465637446628067, 0.5573574248449519, 0.759214023347565, 0.7318435694664093),
    ("graph:wheel", "jacobi:0.6667", 2, 0.5599950190184523, 0.3135944213254768, 0.613286688435437, 0.4696321353070798),
    ("graph:wheel", "jacobi:0.6667", 4, 0.6733025543882344, 0.4533363297457211, 0.6926108032688647, 0.64245809262188),
    ("graph:wheel", "gs", 2, 0.4915807145673673, 0.2416515989345636, 0.5219144158414666, 0.22112595173460647),
    ("graph:wheel", "gs", 4, 0.5544462052084249, 0.3074105944700226, 0.5657863559672834, 0.31000576647768047),
];

const TOL: f64 = 1e-10;

fn problem(name: &str) -> ProblemSpec {
    match name {
        "neumann1d:8" => ProblemSpec::NeumannLaplacian1D { n: 8 },
        "neumann1d:16" => ProblemSpec::NeumannLaplacian1D { n: 16 },
        "neumann1d:32" => ProblemSpec::NeumannLaplacian1D { n: 32 },
        "neumann2d:8x8" => ProblemSpec::NeumannLaplacian2D { nx: 8, ny: 8 },
        "graph:two-cycles" => two_cycles(),
        "graph:ladder" => ladder(),
        "graph:wheel" => wheel(),
        other => panic!("unknown frozen problem {other}"),
    }
}

fn hierarchy(name: &str, smoother: &str, k: usize) -> TwoGridHierarchy {
    let p = generate_problem(&problem(name), 0, None).unwrap();
    let spec = match smoother {
        "gs" => SmootherSpec::GaussSeidel,
        "jacobi:0.5000" => SmootherSpec::jacobi(0.5),
        "jacobi:0.6667" => SmootherSpec::jacobi(2.0 / 3.0),
        other => panic!("unknown frozen smoother {other}"),
    };
    let n = p.a.dim();
    let pm: DenseMatrix = aggregation_prolongation(n, k).unwrap();
    build_hierarchy(&p.a, &pm, &spec, &TolerancePolicy::for_dim(n)).unwrap()
}

#[test]
fn exact_factor_matches_frozen_reference() {
    for &(name, sm, k, tg, _, _, _) in FROZEN {
        let h = hierarchy(name, sm, k);
        let r = exact_factor(&h).unwrap();
        assert!((r.factor_identity - tg).abs() <= TOL, "{name}/{sm}/{k}: {} vs {tg}", r.factor_identity);
        assert!((r.factor_oracle - tg).abs() <= TOL, "{name}/{sm}/{k}: oracle {}", r.factor_oracle);
    }
}

#[test]
fn symmetrized_factor_matches_frozen_reference() {
    for &(name, sm, k, _, stg, _, _) in FROZEN {
        let h = hierarchy(name, sm, k);
        let got = seminorm_oracle(&h, Iteration::Stg).unwrap();
        assert!((got - stg).abs() <= TOL, "{name}/{sm}/{k}: {got} vs {stg}");
    }
}

#[test]
fn inexact_factor_matches_frozen_reference() {
    for &(name, sm, k, _, _, itg, _) in FROZEN {
        let h = hierarchy(name, sm, k);
        let bc = spsd_certify(&h.ac().matrix().scale(2.0), h.tolerance()).unwrap();
        let r = inexact_linear_analysis(&h, &bc).unwrap();
        assert!((r.factor_exact_itg - itg).abs() <= TOL, "{name}/{sm}/{k}: {} vs {itg}", r.factor_exact_itg);
    }
}

#[test]
fn spectral_radius_never_exceeds_factor() {
    for &(name, sm, k, tg, _, _, rho) in FROZEN {
        assert!(rho <= tg + TOL, "{name}/{sm}/{k}");
        let h = hierarchy(name, sm, k);
        assert!(exact_factor(&h).unwrap().factor_identity >= rho - TOL);
    }
}
