//! The translated systems against a direct interpreter of the source models.

mod support;

use support::oracle_agreement;

#[test]
fn check_axiom_matches_oracle() {
    oracle_agreement("checkAxiomAndProperty.asm").unwrap();
}

#[test]
fn collatz_matches_oracle() {
    oracle_agreement("collatz.asm").unwrap();
}

#[test]
fn critical_section_matches_oracle() {
    oracle_agreement("criticalSectionProblem.asm").unwrap();
}

#[test]
fn ferryman_matches_oracle() {
    oracle_agreement("ferryman.asm").unwrap();
}

#[test]
fn philosophers_match_oracle() {
    oracle_agreement("diningPhilosophers.asm").unwrap();
}

#[test]
fn sluice_matches_oracle() {
    oracle_agreement("sluiceGateControl.asm").unwrap();
}

#[test]
fn traffic_light_matches_oracle() {
    oracle_agreement("oneWayTrafficLightControl.asm").unwrap();
}

#[test]
fn subset_domain_matches_oracle() {
    oracle_agreement("subsetDomain.asm").unwrap();
}
