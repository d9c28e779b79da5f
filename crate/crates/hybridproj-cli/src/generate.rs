//! Deterministic random instance generation. Every template plants a common
//! solution p* shared by all families, so the common solution set is
//! nonempty by construction, and records it for oracle checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hybridproj::catalog::gep_membership_margin;
use hybridproj::space::Vector;

use crate::experiment::{
    build_instance, BifunctionJson, ConfigJson, EquilibriumPairJson, ExperimentFile, FamiliesJson,
    FixedPointJson, IsmJson, MapJson, ScheduleJson, SchedulesJson, SetJson, SpaceJson,
};
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    TwoEp,
    TwoVi,
    FpOnly,
    FullTheorem1,
    MultiQ,
}

impl Template {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "two-ep" => Template::TwoEp,
            "two-vi" => Template::TwoVi,
            "fp-only" => Template::FpOnly,
            "full-theorem1" => Template::FullTheorem1,
            "multi-q" => Template::MultiQ,
            other => {
                return Err(HarnessError::Validation(format!(
                    "unknown template '{other}' (expected two-ep | two-vi | fp-only | \
                     full-theorem1 | multi-q)"
                )))
            }
        })
    }
}

const GEN_DIM: usize = 5;

/// Random symmetric positive-definite matrix: a diagonal in [0.5, 2] rotated
/// by two Givens rotations.
fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = diag[i];
            row
        })
        .collect();
    for _ in 0..2 {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        if i == j {
            j = (j + 1) % n;
        }
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (s, c) = theta.sin_cos();
        // M <- G^T M G for the Givens rotation G in the (i, j) plane.
        for row in m.iter_mut() {
            let (a, b) = (row[i], row[j]);
            row[i] = c * a - s * b;
            row[j] = s * a + c * b;
        }
        for col in 0..n {
            let (a, b) = (m[i][col], m[j][col]);
            m[i][col] = c * a - s * b;
            m[j][col] = s * a + c * b;
        }
    }
    // Symmetrize away rotation roundoff.
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = avg;
            m[j][i] = avg;
        }
    }
    m
}

fn box_around(rng: &mut ChaCha8Rng, p_star: &[f64]) -> SetJson {
    let lower: Vec<f64> = p_star
        .iter()
        .map(|v| v - rng.gen_range(0.3..1.0))
        .collect();
    let upper: Vec<f64> = p_star
        .iter()
        .map(|v| v + rng.gen_range(0.3..1.0))
        .collect();
    SetJson::Box { lower, upper }
}

fn ball_around(rng: &mut ChaCha8Rng, p_star: &[f64]) -> SetJson {
    let offset: Vec<f64> = (0..p_star.len())
        .map(|_| rng.gen_range(-0.2..0.2))
        .collect();
    let center: Vec<f64> = p_star.iter().zip(&offset).map(|(v, o)| v + o).collect();
    let off_norm = offset.iter().map(|v| v * v).sum::<f64>().sqrt();
    SetJson::Ball {
        center,
        radius: off_norm + rng.gen_range(0.3..0.8),
    }
}

fn separable_at(rng: &mut ChaCha8Rng, p_star: &[f64]) -> BifunctionJson {
    BifunctionJson::Separable {
        hessian: random_spd(rng, p_star.len()),
        center: p_star.to_vec(),
    }
}

fn gradient_at(rng: &mut ChaCha8Rng, p_star: &[f64]) -> MapJson {
    MapJson::QuadraticGradient {
        hessian: random_spd(rng, p_star.len()),
        center: p_star.to_vec(),
    }
}

/// Build the problem file for `template` from `seed`; the same seed yields
/// byte-identical files.
pub fn generate_instance(template: Template, seed: u64) -> Result<ExperimentFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = GEN_DIM;
    let p_star: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let set = SetJson::Box {
        lower: p_star.iter().map(|v| v - 1.5).collect(),
        upper: p_star.iter().map(|v| v + 1.5).collect(),
    };
    let start: Vec<f64> = p_star
        .iter()
        .map(|v| v + rng.gen_range(-1.2..1.2))
        .collect();

    let space = SpaceJson {
        kind: "hilbert".into(),
        dim: n,
        p: None,
        c: None,
    };

    let zero_pair = || EquilibriumPairJson {
        bifunction: BifunctionJson::Zero { dim: n },
        perturbation: None,
    };

    let (families, runner, beta) = match template {
        Template::FpOnly => {
            let families = FamiliesJson {
                fixed_point: vec![
                    FixedPointJson::Projection {
                        target: box_around(&mut rng, &p_star),
                    },
                    FixedPointJson::Projection {
                        target: ball_around(&mut rng, &p_star),
                    },
                ],
                ism: vec![],
                equilibrium: vec![zero_pair(), zero_pair()],
            };
            (families, "theorem2", vec![0.5, 0.5])
        }
        Template::TwoEp => {
            let families = FamiliesJson {
                fixed_point: vec![FixedPointJson::Projection {
                    target: ball_around(&mut rng, &p_star),
                }],
                ism: vec![],
                equilibrium: vec![
                    EquilibriumPairJson {
                        bifunction: separable_at(&mut rng, &p_star),
                        perturbation: None,
                    },
                    EquilibriumPairJson {
                        bifunction: separable_at(&mut rng, &p_star),
                        perturbation: None,
                    },
                ],
            };
            (families, "corollary44", vec![0.5, 0.5])
        }
        Template::TwoVi => {
            let families = FamiliesJson {
                fixed_point: vec![FixedPointJson::Projection {
                    target: box_around(&mut rng, &p_star),
                }],
                ism: vec![],
                equilibrium: vec![
                    EquilibriumPairJson {
                        bifunction: BifunctionJson::Zero { dim: n },
                        perturbation: Some(gradient_at(&mut rng, &p_star)),
                    },
                    EquilibriumPairJson {
                        bifunction: BifunctionJson::Zero { dim: n },
                        perturbation: Some(gradient_at(&mut rng, &p_star)),
                    },
                ],
            };
            (families, "corollary43", vec![0.5, 0.5])
        }
        Template::FullTheorem1 => {
            let families = FamiliesJson {
                fixed_point: vec![
                    FixedPointJson::Projection {
                        target: box_around(&mut rng, &p_star),
                    },
                    FixedPointJson::Identity { dim: n },
                ],
                ism: vec![
                    IsmJson {
                        map: gradient_at(&mut rng, &p_star),
                        gamma: None,
                    },
                    IsmJson {
                        map: gradient_at(&mut rng, &p_star),
                        gamma: None,
                    },
                ],
                equilibrium: vec![
                    EquilibriumPairJson {
                        bifunction: separable_at(&mut rng, &p_star),
                        perturbation: None,
                    },
                    EquilibriumPairJson {
                        bifunction: BifunctionJson::Zero { dim: n },
                        perturbation: Some(gradient_at(&mut rng, &p_star)),
                    },
                ],
            };
            (families, "theorem1", vec![0.5, 0.5])
        }
        Template::MultiQ => {
            let families = FamiliesJson {
                fixed_point: vec![FixedPointJson::Identity { dim: n }],
                ism: vec![],
                equilibrium: vec![
                    EquilibriumPairJson {
                        bifunction: separable_at(&mut rng, &p_star),
                        perturbation: None,
                    },
                    EquilibriumPairJson {
                        bifunction: separable_at(&mut rng, &p_star),
                        perturbation: None,
                    },
                    EquilibriumPairJson {
                        bifunction: separable_at(&mut rng, &p_star),
                        perturbation: None,
                    },
                ],
            };
            (families, "theorem4", vec![0.3, 0.3, 0.4])
        }
    };

    let file = ExperimentFile {
        space,
        set,
        families,
        schedules: SchedulesJson {
            alpha: Some(ScheduleJson::Const { value: 0.5 }),
            lambda: None,
            r: Some(ScheduleJson::Const { value: 1.0 }),
            beta: Some(beta),
            beta_n: None,
        },
        start,
        known_common_solution: Some(p_star.clone()),
        anchor: None,
        runner: runner.into(),
        config: ConfigJson {
            seed,
            ..ConfigJson::default()
        },
        outputs: None,
    };

    verify_planted(&file, &p_star)?;
    Ok(file)
}

/// Residuals of every family at the planted solution must vanish.
fn verify_planted(file: &ExperimentFile, p_star: &[f64]) -> Result<()> {
    let instance = build_instance(file)?;
    instance
        .validate()
        .map_err(|e| HarnessError::Validation(e.to_string()))?;
    let p = Vector::new(p_star.to_vec());
    for t in &instance.fixed_point_maps {
        let tp = t
            .eval(&instance.space, &p)
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
        let res = tp.sub(&p).euclidean_norm();
        if res > 1e-12 {
            return Err(HarnessError::Validation(format!(
                "planted point is not fixed (residual {res:.3e})"
            )));
        }
    }
    for a in &instance.ism_operators {
        let res = a
            .eval(&p)
            .map_err(|e| HarnessError::Validation(e.to_string()))?
            .euclidean_norm();
        if res > 1e-12 {
            return Err(HarnessError::Validation(format!(
                "planted point is not an operator zero (residual {res:.3e})"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e12);
    for (f, b) in &instance.equilibrium_pairs {
        let margin = gep_membership_margin(f, b, &instance.set, &p, &mut rng, 100)
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
        if margin < -1e-12 {
            return Err(HarnessError::Validation(format!(
                "planted point fails an equilibrium margin ({margin:.3e})"
            )));
        }
    }
    Ok(())
}

pub fn render_json(file: &ExperimentFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("schema types serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        for template in [
            Template::TwoEp,
            Template::TwoVi,
            Template::FpOnly,
            Template::FullTheorem1,
            Template::MultiQ,
        ] {
            let a = render_json(&generate_instance(template, 0).unwrap());
            let b = render_json(&generate_instance(template, 0).unwrap());
            assert_eq!(a, b);
            let c = render_json(&generate_instance(template, 1).unwrap());
            assert_ne!(a, c);
        }
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..5 {
            let file = generate_instance(Template::FullTheorem1, seed).unwrap();
            let instance = build_instance(&file).unwrap();
            instance.validate().unwrap();
        }
    }
}
