//! The pipeline stages behind each subcommand.

use crate::config::{ExperimentConfig, HpTarget};
use crate::log::RunLog;
use serde::Serialize;
use std::path::{Path, PathBuf};
use wanalytic::functions::{PowerExp, Radial, RadialFunction};
use wanalytic::io::write_atomic;
use wanalytic::potentials::{certify_weighted_analytic, Certificate, SamplePlan};
use wanalytic::scf::{scf_solve, ScfState, SystemSpec};
use wanalytic::verify::envelope::{envelope_study_from, EnvelopeStudy, SeriesProfile};
use wanalytic::verify::{
    all_pass, hp_comparison, reports_summary_csv, reports_to_json, verify_suite,
};
use wanalytic::weights::{j_class_check, Envelope, JClassReport, SingularSet};

/// Why a command stopped without a verdict.
#[derive(Debug)]
pub enum Failure {
    /// bad config, arguments or IO: exit 1
    Usage(String),
    /// a numerical method failed on valid input: exit 2
    Numerical(String),
}

impl From<wanalytic::Error> for Failure {
    fn from(e: wanalytic::Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

pub type Outcome = Result<bool, Failure>;

pub struct Runner {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub log: RunLog,
    pub quiet: bool,
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("outputs serialize");
    s.push('\n');
    s
}

/// Seminorm sequence and fitted envelope of one orbital.
#[derive(Debug, Serialize)]
struct AnalyticEnvelope<'a> {
    orbital: usize,
    p: f64,
    gamma: f64,
    radius: f64,
    orders: &'a [u32],
    envelope: Envelope,
    per_order: &'a [f64],
    growth_ratio: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct MainEnvelopeReport<'a> {
    pass: bool,
    certificate: &'a Certificate,
    study: &'a EnvelopeStudy,
}

impl Runner {
    fn say(&self, msg: &str) {
        if !self.quiet {
            println!("{msg}");
        }
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.out.join(name);
        write_atomic(&path, contents.as_bytes())?;
        self.log.line(&format!("wrote {}", path.display()));
        Ok(path)
    }

    fn system(&self) -> Result<&SystemSpec, Failure> {
        self.config
            .system
            .as_ref()
            .ok_or_else(|| Failure::Usage("config has no `system` section".into()))
    }

    fn solve_state(&mut self) -> Result<(ScfState, bool), Failure> {
        let spec = self.system()?.clone();
        self.log.line("solve: started");
        let state = scf_solve(&spec, &self.config.scf)?;
        let summary = state.summary(spec.kinetic);
        self.write("orbitals.csv", &state.orbitals_csv())?;
        self.write("potentials.csv", &state.potentials_csv())?;
        self.write("summary.json", &to_json(&summary))?;
        self.say(&format!(
            "solve: converged {} after {} iterations, lambdas {:?}, max residual {:.3e}",
            state.converged, state.iterations, state.lambdas, summary.max_residual
        ));
        let converged = state.converged;
        Ok((state, converged))
    }

    pub fn solve(&mut self) -> Outcome {
        Ok(self.solve_state()?.1)
    }

    fn envelope_of(&mut self, state: &ScfState) -> Outcome {
        let spec = self.system()?.clone();
        if !state.converged {
            return Err(Failure::Numerical(
                "envelope needs a converged SCF state".into(),
            ));
        }
        self.log.line("envelope: started");
        let sn = self.config.seminorms;
        let env = self.config.envelope;
        let ode = state.ode(&spec)?;
        let mut pass = true;
        let mut envelopes = Vec::new();
        let mut reports: Vec<JClassReport> = Vec::new();
        for i in 0..state.orbitals.len() {
            let profile =
                SeriesProfile::from_state(state, &ode, i, sn.radius, sn.max_order as usize)?;
            let field = Radial::new(profile, spec.dim);
            let r = j_class_check(
                &field,
                sn.p,
                sn.gamma,
                sn.radius,
                sn.max_order,
                &sn.quadrature,
            )?;
            self.write(&format!("seminorms_{i}.csv"), &r.sequence.to_csv())?;
            pass &= r.pass;
            reports.push(r);
        }
        for (i, r) in reports.iter().enumerate() {
            envelopes.push(AnalyticEnvelope {
                orbital: i,
                p: sn.p,
                gamma: sn.gamma,
                radius: sn.radius,
                orders: &r.sequence.orders,
                envelope: r.envelope,
                per_order: &r.per_order,
                growth_ratio: r.growth_ratio,
                pass: r.pass,
            });
        }
        self.write("analytic_envelope.json", &to_json(&envelopes))?;

        let set = SingularSet::new(spec.potential.centers(), env.blend)?;
        let certificate = certify_weighted_analytic(
            &spec.potential,
            &set,
            env.study.epsilon,
            env.certificate_order,
            &SamplePlan::standard(spec.dim),
        )?;
        let study = envelope_study_from(state, &spec, &self.config.scf, &env.study)?;
        let main_pass = certificate.is_certified() && study.pass;
        self.write(
            "main_envelope.json",
            &to_json(&MainEnvelopeReport {
                pass: main_pass,
                certificate: &certificate,
                study: &study,
            }),
        )?;
        self.say(&format!(
            "envelope: seminorm envelopes A = {:?}; main envelope A = {:.4} (doubled {:.4}, refined {:.4}), certified {}, stable {}",
            envelopes.iter().map(|e| e.envelope.a).collect::<Vec<_>>(),
            study.base.a,
            study.doubled.a,
            study.refined.a,
            certificate.is_certified(),
            study.pass
        ));
        Ok(pass && main_pass)
    }

    pub fn envelope(&mut self) -> Outcome {
        let (state, ok) = self.solve_state()?;
        if !ok {
            return Ok(false);
        }
        self.envelope_of(&state)
    }

    pub fn verify(&mut self) -> Outcome {
        self.log.line("verify: started");
        let outcome = verify_suite(&self.config.verify)?;
        self.write("reports.json", &reports_to_json(&outcome.reports))?;
        self.write(
            "reports_summary.csv",
            &reports_summary_csv(&outcome.reports),
        )?;
        if let Some(c) = &outcome.constants {
            self.write("constants.json", &to_json(c))?;
        }
        for r in &outcome.reports {
            self.say(&format!(
                "verify: {:<24} {} cases {:>7} max ratio {:.4e} constant {:.4e}{}",
                r.lemma,
                if r.pass { "pass" } else { "FAIL" },
                r.cases,
                r.max_ratio,
                r.fitted_constant,
                if r.skipped.is_some() {
                    " (skipped)"
                } else {
                    ""
                }
            ));
        }
        Ok(all_pass(&outcome.reports))
    }

    fn hp_with(&mut self, state: Option<&ScfState>) -> Outcome {
        self.log.line("hp: started");
        let hp = self.config.hp.clone();
        let series;
        let model;
        let target: &dyn RadialFunction = match hp.target {
            HpTarget::Model { power, decay } => {
                model = PowerExp::new(1.0, power, decay);
                &model
            }
            HpTarget::Orbital { index } => {
                let spec = self.system()?.clone();
                let owned;
                let state = match state {
                    Some(s) => s,
                    None => {
                        owned = self.solve_state()?.0;
                        &owned
                    }
                };
                if index >= state.orbitals.len() {
                    return Err(Failure::Usage(format!(
                        "hp.target.index {index} out of range"
                    )));
                }
                let ode = state.ode(&spec)?;
                // the projection only evaluates values
                series = SeriesProfile::from_state(state, &ode, index, hp.params.radius, 0)?;
                &series
            }
        };
        let c = hp_comparison(target, &hp.params)?;
        self.write("hp_geometric.csv", &c.geometric.to_csv())?;
        self.write("hp_uniform.csv", &c.uniform.to_csv())?;
        self.write("hp_summary.json", &to_json(&c))?;
        self.say(&format!(
            "hp: geometric slope {:.4} per sqrt(DOF), correlation {:.5}; exponential {}, uniform control algebraic {}",
            c.geometric.sqrt_fit.slope,
            c.geometric.sqrt_fit.correlation,
            c.exponential,
            c.algebraic_control
        ));
        Ok(c.pass())
    }

    pub fn hp(&mut self) -> Outcome {
        self.hp_with(None)
    }

    /// solve, envelope, verify and hp in sequence on one SCF state.
    pub fn all(&mut self) -> Outcome {
        let (state, solved) = self.solve_state()?;
        let enveloped = if solved {
            self.envelope_of(&state)?
        } else {
            false
        };
        let verified = self.verify()?;
        let hp = self.hp_with(Some(&state))?;
        Ok(solved && enveloped && verified && hp)
    }
}

/// Output directory: flag, then config, then the current directory.
pub fn output_dir(flag: Option<&Path>, config: &ExperimentConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}
