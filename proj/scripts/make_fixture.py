#!/usr/bin/env python3
"""Writes the shipped fixture corpus, diffdx file and subword vocab.

The pages are synthetic encyclopedia entries built from per-system templates.
Output is deterministic; rerun after editing and commit the files under
data/fixture/.
"""

import json
import random
import re
from collections import Counter
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "data" / "fixture"

SYSTEMS = {
    "respiratory": dict(
        organ="the airways and lungs",
        symptoms=["cough", "shortness of breath", "wheezing", "chest tightness", "sputum production",
                  "sore throat", "nasal congestion", "fatigue", "low grade fever"],
        tests=["chest radiography", "spirometry", "pulse oximetry", "sputum culture", "a nasal swab"],
        treatments=["rest", "inhaled bronchodilators", "fluids", "antibiotics when bacterial infection is confirmed",
                    "inhaled corticosteroids", "smoking cessation"],
        specialist="a pulmonologist"),
    "gastro": dict(
        organ="the digestive tract",
        symptoms=["abdominal pain", "diarrhea", "nausea", "vomiting", "bloating", "weight loss", "heartburn",
                  "rectal bleeding", "loss of appetite"],
        tests=["endoscopy", "colonoscopy", "stool testing", "abdominal ultrasound", "blood tests of liver function"],
        treatments=["dietary changes", "proton pump inhibitors", "anti inflammatory drugs", "surgery in severe cases",
                    "rehydration"],
        specialist="a gastroenterologist"),
    "neuro": dict(
        organ="the brain and nervous system",
        symptoms=["headache", "numbness", "weakness of one side", "blurred vision", "dizziness", "seizures",
                  "memory loss", "tremor", "difficulty speaking"],
        tests=["magnetic resonance imaging", "computed tomography", "electroencephalography", "lumbar puncture",
               "a neurological examination"],
        treatments=["pain relief", "anticonvulsant drugs", "physical therapy", "immunotherapy", "lifestyle changes"],
        specialist="a neurologist"),
    "cardio": dict(
        organ="the heart and blood vessels",
        symptoms=["chest pain", "palpitations", "shortness of breath", "swelling of the legs", "fainting",
                  "sweating", "fatigue", "irregular heartbeat"],
        tests=["electrocardiography", "echocardiography", "troponin measurement", "coronary angiography",
               "blood pressure monitoring"],
        treatments=["aspirin", "beta blockers", "anticoagulants", "statins", "lifestyle changes",
                    "revascularization procedures"],
        specialist="a cardiologist"),
    "infectious": dict(
        organ="several organ systems",
        symptoms=["high fever", "rash", "muscle aches", "chills", "headache", "swollen lymph nodes", "fatigue",
                  "joint pain", "loss of appetite"],
        tests=["blood culture", "serology", "polymerase chain reaction", "a complete blood count",
               "rapid antigen testing"],
        treatments=["antiviral drugs", "antibiotics", "supportive care", "vaccination of contacts", "fluids",
                    "antipyretics"],
        specialist="an infectious disease specialist"),
    "rheum": dict(
        organ="the joints and connective tissue",
        symptoms=["joint pain", "morning stiffness", "swelling of the joints", "fatigue", "reduced range of motion",
                  "skin rash", "low grade fever"],
        tests=["rheumatoid factor testing", "joint radiography", "erythrocyte sedimentation rate",
               "joint fluid analysis", "antinuclear antibody testing"],
        treatments=["nonsteroidal anti inflammatory drugs", "disease modifying drugs", "corticosteroids",
                    "physical therapy", "joint replacement surgery"],
        specialist="a rheumatologist"),
    "derm": dict(
        organ="the skin",
        symptoms=["itching", "redness", "scaling", "blisters", "dry skin", "swelling", "crusting", "pain"],
        tests=["skin biopsy", "patch testing", "a wound culture", "a visual examination by a clinician",
               "dermoscopy"],
        treatments=["topical corticosteroids", "emollients", "oral antibiotics", "phototherapy",
                    "avoidance of triggers"],
        specialist="a dermatologist"),
    "endocrine": dict(
        organ="the endocrine glands",
        symptoms=["weight gain", "weight loss", "fatigue", "heat intolerance", "cold intolerance", "excessive thirst",
                  "frequent urination", "mood changes", "hair loss"],
        tests=["thyroid function tests", "blood glucose measurement", "hormone assays", "imaging of the gland",
               "glycated hemoglobin"],
        treatments=["hormone replacement", "insulin", "dietary management", "surgery of the gland",
                    "antithyroid drugs"],
        specialist="an endocrinologist"),
    "psych": dict(
        organ="mood, thought and behavior",
        symptoms=["persistent sadness", "anxiety", "sleep disturbance", "poor concentration", "irritability",
                  "social withdrawal", "restlessness", "changes in appetite"],
        tests=["a structured clinical interview", "rating scales", "a physical examination to exclude other causes",
               "screening questionnaires"],
        treatments=["psychotherapy", "antidepressants", "mood stabilizers", "antipsychotic drugs",
                    "cognitive behavioral therapy"],
        specialist="a psychiatrist"),
    "renal": dict(
        organ="the kidneys and urinary tract",
        symptoms=["flank pain", "painful urination", "blood in the urine", "frequent urination", "swelling",
                  "nausea", "reduced urine output", "fever"],
        tests=["urinalysis", "urine culture", "serum creatinine", "renal ultrasound", "computed tomography"],
        treatments=["fluids", "antibiotics", "pain relief", "dialysis in advanced cases", "dietary restriction"],
        specialist="a nephrologist"),
    "heme": dict(
        organ="the blood",
        symptoms=["fatigue", "pallor", "shortness of breath", "easy bruising", "dizziness", "cold hands",
                  "rapid heartbeat", "jaundice"],
        tests=["a complete blood count", "a peripheral blood smear", "iron studies", "bone marrow biopsy",
               "vitamin levels"],
        treatments=["iron supplementation", "vitamin supplementation", "blood transfusion", "chelation therapy",
                    "treatment of the underlying cause"],
        specialist="a hematologist"),
    "sense": dict(
        organ="the eyes, ears and throat",
        symptoms=["eye pain", "blurred vision", "ear pain", "hearing loss", "sore throat", "redness", "discharge",
                  "fever"],
        tests=["an eye examination", "tonometry", "otoscopy", "a throat swab", "audiometry"],
        treatments=["eye drops", "antibiotics", "surgery", "pain relief", "observation"],
        specialist="an ophthalmologist or otolaryngologist"),
}

# title, system, cause, distinctive findings, differential diagnoses
CONDITIONS = [
    ("Common cold", "respiratory", "rhinoviruses", ["runny nose", "sneezing"], ["Influenza", "Allergic rhinitis", "Acute sinusitis", "Acute bronchitis"]),
    ("Influenza", "respiratory", "influenza viruses", ["sudden onset of fever", "body aches"], ["Common cold", "COVID-19", "Viral pneumonia"]),
    ("Acute bronchitis", "respiratory", "viral infection of the bronchi", ["productive cough"], ["Common cold", "Chronic bronchitis", "Bacterial pneumonia", "Asthma"]),
    ("Chronic bronchitis", "respiratory", "long term smoking", ["daily productive cough for months"], ["Asthma", "Chronic obstructive pulmonary disease", "Bronchiectasis"]),
    ("Acute sinusitis", "respiratory", "infection of the paranasal sinuses", ["facial pressure"], ["Common cold", "Allergic rhinitis", "Chronic sinusitis"]),
    ("Chronic sinusitis", "respiratory", "persistent inflammation of the sinuses", ["reduced sense of smell"], ["Acute sinusitis", "Nasal polyps"]),
    ("Allergic rhinitis", "respiratory", "an allergic response to pollen or dust", ["itchy eyes", "sneezing"], ["Common cold", "Acute sinusitis"]),
    ("Viral pneumonia", "respiratory", "viral infection of the lung tissue", ["crackles on auscultation"], ["Bacterial pneumonia", "Influenza", "COVID-19"]),
    ("Bacterial pneumonia", "respiratory", "Streptococcus pneumoniae", ["lobar consolidation"], ["Viral pneumonia", "Tuberculosis", "Pulmonary embolism"]),
    ("Asthma", "respiratory", "airway hyperresponsiveness", ["episodic wheezing"], ["Chronic obstructive pulmonary disease", "Acute bronchitis"]),
    ("Chronic obstructive pulmonary disease", "respiratory", "smoking and air pollution", ["barrel chest"], ["Asthma", "Heart failure", "Chronic bronchitis"]),
    ("Tuberculosis", "infectious", "Mycobacterium tuberculosis", ["night sweats", "hemoptysis"], ["Bacterial pneumonia", "Sarcoidosis", "Lung cancer"]),
    ("COVID-19", "infectious", "the coronavirus SARS-CoV-2", ["loss of taste"], ["Influenza", "Common cold", "Viral pneumonia"]),
    ("Measles", "infectious", "the measles virus", ["Koplik spots"], ["Rubella", "Scarlet fever", "Chickenpox"]),
    ("Chickenpox", "infectious", "the varicella zoster virus", ["itchy vesicles"], ["Shingles", "Measles", "Impetigo"]),
    ("Shingles", "infectious", "reactivation of the varicella zoster virus", ["a band of painful blisters"], ["Chickenpox", "Contact dermatitis"]),
    ("Lyme disease", "infectious", "Borrelia burgdorferi transmitted by ticks", ["erythema migrans"], ["Rheumatoid arthritis", "Cellulitis"]),
    ("Malaria", "infectious", "Plasmodium parasites transmitted by mosquitoes", ["cyclic fevers"], ["Dengue fever", "Typhoid fever"]),
    ("Dengue fever", "infectious", "the dengue virus", ["pain behind the eyes"], ["Malaria", "Typhoid fever", "Chikungunya"]),
    ("Typhoid fever", "infectious", "Salmonella Typhi", ["rose spots"], ["Malaria", "Dengue fever"]),
    ("Scarlet fever", "infectious", "group A Streptococcus", ["sandpaper rash", "strawberry tongue"], ["Measles", "Strep throat"]),
    ("Rheumatic fever", "infectious", "an immune reaction after streptococcal infection", ["migratory arthritis"], ["Rheumatoid arthritis", "Lyme disease"]),
    ("Infectious mononucleosis", "infectious", "the Epstein Barr virus", ["splenomegaly"], ["Strep throat", "Tonsillitis"]),
    ("Strep throat", "sense", "group A Streptococcus", ["tonsillar exudate"], ["Tonsillitis", "Infectious mononucleosis"]),
    ("Tonsillitis", "sense", "viral or bacterial infection of the tonsils", ["swollen tonsils"], ["Strep throat", "Infectious mononucleosis"]),
    ("Otitis media", "sense", "infection of the middle ear", ["bulging eardrum"], ["Otitis externa"]),
    ("Conjunctivitis", "sense", "viral, bacterial or allergic inflammation", ["pink eye"], ["Glaucoma", "Uveitis"]),
    ("Glaucoma", "sense", "raised intraocular pressure", ["loss of peripheral vision"], ["Cataract", "Conjunctivitis"]),
    ("Cataract", "sense", "clouding of the lens", ["glare around lights"], ["Glaucoma", "Macular degeneration"]),
    ("Gastroesophageal reflux disease", "gastro", "a weak lower esophageal sphincter", ["regurgitation"], ["Peptic ulcer disease", "Stable angina"]),
    ("Peptic ulcer disease", "gastro", "Helicobacter pylori or anti inflammatory drugs", ["epigastric pain"], ["Gastroesophageal reflux disease", "Acute pancreatitis", "Cholecystitis"]),
    ("Crohn's disease", "gastro", "an abnormal immune response in the gut", ["fistulas"], ["Ulcerative colitis", "Irritable bowel syndrome", "Celiac disease"]),
    ("Ulcerative colitis", "gastro", "chronic inflammation of the colon", ["bloody diarrhea"], ["Crohn's disease", "Irritable bowel syndrome"]),
    ("Irritable bowel syndrome", "gastro", "altered gut motility and sensitivity", ["cramping relieved by defecation"], ["Crohn's disease", "Celiac disease", "Ulcerative colitis"]),
    ("Celiac disease", "gastro", "an immune reaction to gluten", ["villous atrophy"], ["Irritable bowel syndrome", "Crohn's disease"]),
    ("Acute pancreatitis", "gastro", "gallstones or alcohol", ["pain radiating to the back"], ["Peptic ulcer disease", "Cholecystitis", "Chronic pancreatitis"]),
    ("Chronic pancreatitis", "gastro", "long term alcohol use", ["fatty stools"], ["Acute pancreatitis", "Pancreatic cancer"]),
    ("Appendicitis", "gastro", "obstruction of the appendix", ["pain in the right lower quadrant"], ["Kidney stones", "Ectopic pregnancy", "Crohn's disease"]),
    ("Cholecystitis", "gastro", "gallstones blocking the cystic duct", ["Murphy sign"], ["Acute pancreatitis", "Peptic ulcer disease", "Appendicitis"]),
    ("Hepatitis A", "gastro", "the hepatitis A virus", ["dark urine"], ["Hepatitis B", "Infectious mononucleosis"]),
    ("Hepatitis B", "gastro", "the hepatitis B virus", ["elevated transaminases"], ["Hepatitis A", "Hemochromatosis"]),
    ("Migraine", "neuro", "a neurovascular disorder", ["aura", "sensitivity to light"], ["Tension headache", "Cluster headache", "Stroke"]),
    ("Tension headache", "neuro", "muscle tension and stress", ["band like pressure"], ["Migraine", "Cluster headache"]),
    ("Cluster headache", "neuro", "dysfunction of the hypothalamus", ["pain around one eye"], ["Migraine", "Tension headache"]),
    ("Multiple sclerosis", "neuro", "autoimmune demyelination", ["optic neuritis"], ["Stroke", "Lyme disease"]),
    ("Parkinson's disease", "neuro", "loss of dopaminergic neurons", ["resting tremor", "rigidity"], ["Essential tremor", "Wilson's disease"]),
    ("Alzheimer's disease", "neuro", "amyloid plaques and neurofibrillary tangles", ["progressive forgetfulness"], ["Vascular dementia", "Major depressive disorder", "Hypothyroidism"]),
    ("Epilepsy", "neuro", "abnormal electrical activity in the brain", ["recurrent unprovoked seizures"], ["Syncope", "Transient ischemic attack"]),
    ("Bell's palsy", "neuro", "inflammation of the facial nerve", ["facial droop"], ["Stroke", "Lyme disease"]),
    ("Stroke", "neuro", "interrupted blood supply to the brain", ["sudden facial droop"], ["Transient ischemic attack", "Migraine", "Bell's palsy"]),
    ("Transient ischemic attack", "neuro", "temporary loss of blood flow to the brain", ["symptoms resolving within an hour"], ["Stroke", "Migraine", "Epilepsy"]),
    ("Myocardial infarction", "cardio", "occlusion of a coronary artery", ["crushing chest pain"], ["Stable angina", "Pulmonary embolism", "Acute pericarditis", "Gastroesophageal reflux disease"]),
    ("Stable angina", "cardio", "narrowing of the coronary arteries", ["pain on exertion"], ["Myocardial infarction", "Gastroesophageal reflux disease"]),
    ("Heart failure", "cardio", "reduced pumping function of the heart", ["orthopnea"], ["Chronic obstructive pulmonary disease", "Chronic kidney disease"]),
    ("Atrial fibrillation", "cardio", "disorganized electrical activity in the atria", ["irregularly irregular pulse"], ["Hyperthyroidism", "Panic disorder"]),
    ("Pulmonary embolism", "cardio", "a blood clot lodged in the pulmonary arteries", ["sudden pleuritic pain"], ["Myocardial infarction", "Bacterial pneumonia", "Deep vein thrombosis"]),
    ("Deep vein thrombosis", "cardio", "a clot forming in a deep vein", ["calf tenderness"], ["Cellulitis", "Pulmonary embolism"]),
    ("Hypertension", "cardio", "a combination of genetic and lifestyle factors", ["often no symptoms"], ["Cushing's syndrome", "Chronic kidney disease"]),
    ("Rheumatoid arthritis", "rheum", "autoimmune inflammation of the synovium", ["symmetric small joint swelling"], ["Osteoarthritis", "Psoriatic arthritis", "Systemic lupus erythematosus", "Gout"]),
    ("Osteoarthritis", "rheum", "wear of the articular cartilage", ["pain worse with use"], ["Rheumatoid arthritis", "Gout"]),
    ("Gout", "rheum", "deposition of uric acid crystals", ["a hot swollen big toe"], ["Septic arthritis", "Rheumatoid arthritis", "Osteoarthritis"]),
    ("Psoriatic arthritis", "rheum", "inflammation associated with psoriasis", ["dactylitis"], ["Rheumatoid arthritis", "Gout", "Psoriasis"]),
    ("Systemic lupus erythematosus", "rheum", "autoantibodies against nuclear antigens", ["a malar rash"], ["Rheumatoid arthritis", "Infectious mononucleosis"]),
    ("Osteoporosis", "rheum", "loss of bone mineral density", ["fragility fractures"], ["Osteomalacia", "Multiple myeloma"]),
    ("Psoriasis", "derm", "immune driven proliferation of skin cells", ["silvery plaques"], ["Eczema", "Contact dermatitis"]),
    ("Eczema", "derm", "a defective skin barrier", ["itchy flexural patches"], ["Psoriasis", "Contact dermatitis", "Scabies"]),
    ("Contact dermatitis", "derm", "contact with an irritant or allergen", ["a rash matching the exposure"], ["Eczema", "Psoriasis"]),
    ("Cellulitis", "derm", "bacterial infection of the deeper skin", ["spreading warmth and redness"], ["Deep vein thrombosis", "Contact dermatitis", "Gout"]),
    ("Impetigo", "derm", "Staphylococcus aureus or Streptococcus", ["honey colored crusts"], ["Chickenpox", "Eczema"]),
    ("Hypothyroidism", "endocrine", "underactivity of the thyroid gland", ["slowed reflexes"], ["Major depressive disorder", "Iron deficiency anemia"]),
    ("Hyperthyroidism", "endocrine", "overactivity of the thyroid gland", ["tremor and weight loss"], ["Generalized anxiety disorder", "Atrial fibrillation"]),
    ("Graves' disease", "endocrine", "antibodies stimulating the thyroid", ["bulging eyes"], ["Hyperthyroidism", "Hashimoto's thyroiditis"]),
    ("Hashimoto's thyroiditis", "endocrine", "autoimmune destruction of the thyroid", ["a firm goiter"], ["Graves' disease", "Hypothyroidism"]),
    ("Type 1 diabetes", "endocrine", "autoimmune destruction of pancreatic beta cells", ["ketoacidosis"], ["Type 2 diabetes"]),
    ("Type 2 diabetes", "endocrine", "insulin resistance", ["gradual onset"], ["Type 1 diabetes", "Cushing's syndrome"]),
    ("Cushing's syndrome", "endocrine", "prolonged exposure to cortisol", ["purple striae"], ["Type 2 diabetes", "Hypothyroidism"]),
    ("Addison's disease", "endocrine", "adrenal insufficiency", ["skin darkening"], ["Hypothyroidism", "Major depressive disorder"]),
    ("Major depressive disorder", "psych", "a mix of genetic, biological and social factors", ["loss of interest"], ["Bipolar disorder", "Hypothyroidism", "Generalized anxiety disorder"]),
    ("Generalized anxiety disorder", "psych", "a mix of genetic and environmental factors", ["excessive worry"], ["Panic disorder", "Hyperthyroidism", "Major depressive disorder"]),
    ("Panic disorder", "psych", "recurrent panic attacks", ["sudden intense fear"], ["Generalized anxiety disorder", "Atrial fibrillation"]),
    ("Bipolar disorder", "psych", "dysregulation of mood", ["manic episodes"], ["Major depressive disorder", "Schizophrenia"]),
    ("Schizophrenia", "psych", "genetic and developmental factors", ["hallucinations"], ["Bipolar disorder"]),
    ("Urinary tract infection", "renal", "bacteria such as Escherichia coli", ["burning on urination"], ["Kidney stones", "Pyelonephritis"]),
    ("Kidney stones", "renal", "crystallization of minerals in urine", ["colicky pain"], ["Appendicitis", "Urinary tract infection", "Pyelonephritis"]),
    ("Acute kidney injury", "renal", "reduced blood flow or toxins", ["a rapid rise in creatinine"], ["Chronic kidney disease"]),
    ("Chronic kidney disease", "renal", "diabetes and hypertension", ["anemia and bone disease"], ["Acute kidney injury", "Heart failure"]),
    ("Iron deficiency anemia", "heme", "blood loss or poor iron intake", ["brittle nails"], ["Anemia of chronic disease", "Thalassemia", "Pernicious anemia"]),
    ("Pernicious anemia", "heme", "lack of intrinsic factor", ["a smooth red tongue"], ["Iron deficiency anemia", "Folate deficiency"]),
    ("Sickle cell disease", "heme", "an inherited hemoglobin mutation", ["painful crises"], ["Thalassemia"]),
    ("Hemochromatosis", "heme", "excess iron absorption", ["bronze skin"], ["Wilson's disease", "Hepatitis B"]),
    ("Wilson's disease", "heme", "copper accumulation", ["Kayser Fleischer rings"], ["Hemochromatosis", "Parkinson's disease"]),
    # procedures: no differential diagnoses
    ("Colonoscopy", "gastro", None, ["a flexible camera"], []),
    ("Lumbar puncture", "neuro", None, ["a needle in the lower back"], []),
    ("Hemodialysis", "renal", None, ["an external filter"], []),
]

NON_MEDICAL = [
    dict(id="p-fleming", title="Alexander Fleming", meta={"is_person": True},
         text="Alexander Fleming was a Scottish physician and microbiologist best known for the discovery of penicillin in 1928, work that later earned him a share of the Nobel Prize and changed the treatment of bacterial infection across the world."),
    dict(id="p-nightingale", title="Florence Nightingale", meta={"is_person": True},
         text="Florence Nightingale was an English social reformer and statistician who founded modern nursing, organized care for wounded soldiers, and used careful charts of mortality to persuade officials to improve sanitation in military hospitals."),
    dict(id="o-who", title="World Health Organization", meta={"is_organization": True},
         text="The World Health Organization is a specialized agency of the United Nations responsible for international public health, coordinating responses to outbreaks, publishing guidelines, and supporting vaccination campaigns in member states around the world."),
    dict(id="o-redcross", title="International Red Cross", meta={"is_organization": True},
         text="The International Red Cross is a humanitarian movement that provides emergency assistance, disaster relief and health education, operating through national societies that train volunteers and deliver blood services in many countries."),
    dict(id="y-1918", title="1918", meta={},
         text="The year 1918 saw the end of the First World War and the start of an influenza pandemic that spread across continents in several waves, infecting a large share of the population and causing many deaths."),
    dict(id="y-1987", title="1987", meta={"is_year": True},
         text="In 1987 several public health campaigns expanded screening programs, and new drugs were approved for chronic conditions, while researchers published long term studies of smoking, diet and heart disease in large populations."),
]

TEMPLATES = {
    "intro": [
        "{Title} is a condition affecting {organ}. It is caused by {cause} and is among the conditions seen by {specialist}. People with {title} typically report {s0} and {s1}, and the illness ranges from mild to severe depending on age and general health.",
        "{Title} is a disorder of {organ} that results from {cause}. Typical features include {s0}, {s1} and {f0}, and the course varies from a brief self limited illness to a chronic problem needing regular follow up by {specialist}.",
    ],
    "signs": [
        "The main signs and symptoms are {s0}, {s1} and {s2}. Many patients also notice {f0}, which helps clinicians recognize the disorder. Symptoms may appear gradually over several days or develop within hours, and children may present differently from adults.",
        "Patients commonly describe {s0} together with {s2}. On examination a clinician may find {f0}. Less common complaints include {s3}, and the severity of symptoms does not always match the extent of the underlying disease.",
    ],
    "cause": [
        "The underlying cause is {cause}. Risk factors include older age, smoking, a family history of similar problems and other chronic illnesses. Research continues into why some people develop severe disease while others remain almost free of symptoms.",
        "Most cases arise from {cause}, although the exact mechanism is still studied. Environmental exposures, genetic background and immune status all influence who becomes ill, and several risk factors can often be modified by changes in daily habits.",
    ],
    "diagnosis": [
        "Diagnosis is usually based on the history and physical examination, supported by {t0} and {t1}. Testing helps confirm the diagnosis, assess severity, and exclude other causes that present in a similar way, particularly in older adults.",
        "Clinicians confirm the diagnosis with {t0}. Further evaluation may include {t1} when the presentation is atypical, and results are interpreted together with the clinical picture because no single test is perfectly accurate.",
    ],
    "differential": [
        "The differential diagnosis includes {dd}. Distinguishing these conditions relies on the timing of symptoms, the pattern of findings such as {f0}, and the results of {t0}, since treatment differs considerably between them.",
        "Several conditions can resemble this one, notably {dd}. Careful attention to {f0} and to the response to initial treatment usually separates them, and {specialist} may be consulted when the picture remains unclear.",
    ],
    "treatment": [
        "Treatment focuses on {r0} and {r1}. Most people improve with appropriate care, although some need long term management by {specialist}. Follow up visits check the response to therapy and watch for complications.",
        "Management includes {r0}, {r1} and, in selected cases, {r2}. Education about the condition, attention to other health problems and regular review help patients maintain function and reduce the chance of relapse.",
    ],
    "epidemiology": [
        "The condition occurs worldwide and affects people of all ages, though rates differ by region and season. Public health measures, early recognition of {s0} and prompt access to {t0} have reduced the burden of serious complications in many countries.",
        "Estimates suggest that millions of people are affected each year. Rates are higher where access to care is limited, and awareness campaigns encourage people with {s0} or {s1} to seek assessment early rather than waiting for symptoms to worsen.",
    ],
}

PROCEDURE_TEMPLATES = [
    "{Title} is a medical procedure involving {f0}. It is performed by trained staff working with {specialist}, and it is used both to diagnose disease and to guide treatment of problems affecting {organ}.",
    "Before {title} patients receive instructions about preparation, medications and fasting. The procedure usually takes less than an hour, and most people return home the same day after a short period of observation.",
    "Complications of {title} are uncommon but include bleeding, infection and discomfort. Staff explain the risks and benefits beforehand, and patients are told which symptoms should prompt them to seek urgent care afterwards.",
    "Indications for {title} include evaluation of {s0}, {s1} and abnormal results of {t0}. Guidelines set out when the procedure is appropriate and how often it should be repeated in people at higher risk.",
]


def join_list(items):
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def lower_first(title):
    # Acronyms and proper-noun titles keep their capitalization in running text.
    if re.match(r"^[A-Z]{2,}", title) or "'" in title.split()[0] or title.split()[0] in {"Type", "Hepatitis", "Lyme", "Bell's"}:
        return title
    return title[0].lower() + title[1:]


def make_pages(rng):
    pages = []
    for idx, (title, system, cause, findings, dd) in enumerate(CONDITIONS):
        sysinfo = SYSTEMS[system]
        s = rng.sample(sysinfo["symptoms"], 4)
        t = rng.sample(sysinfo["tests"], 2)
        r = rng.sample(sysinfo["treatments"], 3)
        slots = dict(Title=title, title=lower_first(title), organ=sysinfo["organ"], cause=cause or "",
                     specialist=sysinfo["specialist"], s0=s[0], s1=s[1], s2=s[2], s3=s[3],
                     t0=t[0], t1=t[1], r0=r[0], r1=r[1], r2=r[2], f0=findings[0],
                     dd=join_list([lower_first(d) for d in dd]) if dd else "")
        if cause is None:
            paragraphs = [p.format(**slots) for p in PROCEDURE_TEMPLATES]
        else:
            sections = ["intro", "signs", "cause", "diagnosis"]
            if dd and rng.random() < 0.5:
                sections.append("differential")
            sections += ["treatment", "epidemiology"]
            paragraphs = [rng.choice(TEMPLATES[sec]).format(**slots) for sec in sections]
        if title == "COVID-19":
            paragraphs.insert(3, "Testing for COVID-19 relies mainly on an RT-PCR test of a nasal swab, which detects viral genetic material; rapid antigen tests are faster but less sensitive, and a negative RT-PCR result early in the illness may need repeating.")
        if rng.random() < 0.3:
            paragraphs.append("See also: related conditions of " + sysinfo["organ"] + ".")
        source = ["wikipedia", "wikidoc", "wikem"][idx % 3]
        slug = re.sub(r"[^a-z0-9]+", "-", title.lower()).strip("-")
        pages.append(dict(id=f"c{idx:03d}-{slug}", title=title, paragraphs=paragraphs, source=source,
                          meta={"is_person": False, "is_organization": False, "is_year": False}))
    for rec in NON_MEDICAL:
        meta = {"is_person": False, "is_organization": False, "is_year": False}
        meta.update(rec["meta"])
        pages.append(dict(id=rec["id"], title=rec["title"], paragraphs=[rec["text"]], source="wikipedia", meta=meta))
    return pages


def make_vocab(pages):
    counts = Counter()
    chars = set()
    for p in pages:
        for text in [p["title"]] + p["paragraphs"]:
            for w in re.findall(r"\w+", text.lower()):
                counts[w] += 1
            chars.update(c for c in text.lower() if not c.isspace())
    # Whole words for the most frequent forms; "cough" stays out so it splits
    # as co ##ugh next to COVID-19's co ##vid.
    whole = [w for w, _ in counts.most_common(260) if w not in {"cough", "covid"}]
    pieces = ["co", "##vid", "19", "##ugh", "pc", "##r", "rt", "##s", "##ing", "##ed", "##ly", "##er", "##tion",
              "##itis", "##osis", "##emia", "##al", "##ic", "##ous", "##ia", "##es", "##ness", "##ment",
              "in", "##in", "re", "##re", "de", "##de", "dis", "pre", "##ation", "hyper", "hypo", "##thy",
              "##roid", "##ism", "##ine", "##ate", "##ar", "##on", "##an", "##en", "##le", "##y"]
    singles = sorted(chars)
    entries = []
    seen = set()
    for e in whole + pieces + singles:
        if e not in seen:
            seen.add(e)
            entries.append(e)
    return entries


def make_diffdx():
    lines = []
    for title, _, _, _, dd in CONDITIONS:
        for d in dd:
            lines.append(f"{title}\t{d}")
    return lines


def main():
    rng = random.Random(20230517)
    pages = make_pages(rng)
    assert len(pages) == 100, len(pages)
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "corpus.jsonl", "w", encoding="utf-8") as f:
        for p in pages:
            f.write(json.dumps(p, ensure_ascii=False) + "\n")
    with open(OUT / "diffdx.tsv", "w", encoding="utf-8") as f:
        f.write("\n".join(make_diffdx()) + "\n")
    with open(OUT / "vocab.txt", "w", encoding="utf-8") as f:
        f.write("\n".join(make_vocab(pages)) + "\n")


if __name__ == "__main__":
    main()
